#include "reqterm/text_pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_map>
#include <unordered_set>

#include "reqterm/errors.hpp"
#include "reqterm/io_util.hpp"

namespace reqterm::text {

namespace {

bool is_letter_byte(unsigned char c) { return std::isalpha(c) || c >= 0x80; }
bool is_digit_byte(unsigned char c) { return std::isdigit(c) != 0; }
bool is_alnum_byte(unsigned char c) { return is_letter_byte(c) || is_digit_byte(c); }

std::string lower_ascii(const std::string& s) {
    std::string out = s;
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

bool has_letter(const std::string& s) {
    return std::any_of(s.begin(), s.end(),
                       [](unsigned char c) { return is_letter_byte(c); });
}

bool ends_with(const std::string& s, const char* suffix) {
    std::size_t n = std::char_traits<char>::length(suffix);
    return s.size() >= n && s.compare(s.size() - n, n, suffix) == 0;
}

// --- lemmatizer -------------------------------------------------------------

// Irregular forms, contractions, and stems whose -e restoration cannot be
// decided by rule. Keys and values are lower case.
const std::unordered_map<std::string, std::string>& irregular_lemmas() {
    static const std::unordered_map<std::string, std::string> table = {
        // be / have / do
        {"am", "be"}, {"is", "be"}, {"are", "be"}, {"was", "be"}, {"were", "be"},
        {"been", "be"}, {"being", "be"},
        {"has", "have"}, {"had", "have"}, {"having", "have"},
        {"does", "do"}, {"did", "do"}, {"done", "do"}, {"doing", "do"},
        {"goes", "go"}, {"went", "go"}, {"gone", "go"}, {"going", "go"},
        // contractions
        {"don't", "do"}, {"doesn't", "do"}, {"didn't", "do"},
        {"isn't", "be"}, {"aren't", "be"}, {"wasn't", "be"}, {"weren't", "be"},
        {"hasn't", "have"}, {"haven't", "have"}, {"hadn't", "have"},
        {"can't", "can"}, {"won't", "will"}, {"shouldn't", "should"},
        {"wouldn't", "would"}, {"couldn't", "could"}, {"mustn't", "must"},
        // common irregular verbs (past / participle / 3sg forms)
        {"ran", "run"}, {"made", "make"}, {"took", "take"}, {"taken", "take"},
        {"gave", "give"}, {"given", "give"}, {"got", "get"}, {"gotten", "get"},
        {"came", "come"}, {"saw", "see"}, {"seen", "see"}, {"knew", "know"},
        {"known", "know"}, {"thought", "think"}, {"found", "find"},
        {"told", "tell"}, {"became", "become"}, {"showed", "show"},
        {"shown", "show"}, {"left", "leave"}, {"felt", "feel"},
        {"brought", "bring"}, {"began", "begin"}, {"begun", "begin"},
        {"kept", "keep"}, {"held", "hold"}, {"wrote", "write"},
        {"written", "write"}, {"stood", "stand"}, {"heard", "hear"},
        {"meant", "mean"}, {"met", "meet"}, {"paid", "pay"}, {"said", "say"},
        {"sent", "send"}, {"sold", "sell"}, {"spoke", "speak"},
        {"spoken", "speak"}, {"spent", "spend"}, {"built", "build"},
        {"bought", "buy"}, {"caught", "catch"}, {"chose", "choose"},
        {"chosen", "choose"}, {"dealt", "deal"}, {"drew", "draw"},
        {"drawn", "draw"}, {"drove", "drive"}, {"driven", "drive"},
        {"fell", "fall"}, {"fallen", "fall"}, {"flew", "fly"}, {"flown", "fly"},
        {"forgot", "forget"}, {"forgotten", "forget"}, {"grew", "grow"},
        {"grown", "grow"}, {"hid", "hide"}, {"hidden", "hide"},
        {"hung", "hang"}, {"laid", "lay"}, {"led", "lead"}, {"lost", "lose"},
        {"rose", "rise"}, {"risen", "rise"}, {"sat", "sit"}, {"slept", "sleep"},
        {"threw", "throw"}, {"thrown", "throw"}, {"understood", "understand"},
        {"wore", "wear"}, {"worn", "wear"}, {"won", "win"}, {"froze", "freeze"},
        {"frozen", "freeze"}, {"sought", "seek"}, {"taught", "teach"},
        {"sang", "sing"}, {"sung", "sing"}, {"rang", "ring"}, {"rung", "ring"},
        {"broke", "break"}, {"broken", "break"}, {"struck", "strike"},
        {"shot", "shoot"}, {"bent", "bend"}, {"lent", "lend"},
        {"arose", "arise"}, {"arisen", "arise"}, {"bore", "bear"},
        {"borne", "bear"}, {"bit", "bite"}, {"bitten", "bite"},
        {"blew", "blow"}, {"blown", "blow"}, {"bred", "breed"},
        {"crept", "creep"}, {"dug", "dig"}, {"fed", "feed"},
        {"fought", "fight"}, {"fled", "flee"}, {"forgave", "forgive"},
        {"forgiven", "forgive"}, {"ground", "grind"}, {"knelt", "kneel"},
        {"lit", "light"}, {"rode", "ride"}, {"ridden", "ride"},
        {"sank", "sink"}, {"sunk", "sink"}, {"slid", "slide"},
        {"stole", "steal"}, {"stolen", "steal"}, {"stuck", "stick"},
        {"swore", "swear"}, {"sworn", "swear"}, {"swept", "sweep"},
        {"swung", "swing"}, {"tore", "tear"}, {"torn", "tear"},
        {"woke", "wake"}, {"woken", "wake"}, {"wound", "wind"},
        {"withdrew", "withdraw"}, {"withdrawn", "withdraw"},
        // past forms in -eed (base forms ending -eed are left untouched)
        {"agreed", "agree"}, {"freed", "free"}, {"guaranteed", "guarantee"},
        {"decreed", "decree"},
        // irregular noun plurals
        {"children", "child"}, {"men", "man"}, {"women", "woman"},
        {"feet", "foot"}, {"teeth", "tooth"}, {"mice", "mouse"},
        {"geese", "goose"}, {"criteria", "criterion"},
        {"phenomena", "phenomenon"}, {"indices", "index"},
        {"matrices", "matrix"}, {"vertices", "vertex"},
        {"analyses", "analysis"}, {"crises", "crisis"}, {"theses", "thesis"},
        {"hypotheses", "hypothesis"}, {"appendices", "appendix"},
        {"axes", "axis"}, {"statuses", "status"},
        // stems whose -e restoration is not decidable by suffix rule
        {"storing", "store"}, {"stored", "store"},
        {"ignoring", "ignore"}, {"ignored", "ignore"},
        {"restoring", "restore"}, {"restored", "restore"},
        {"exploring", "explore"}, {"explored", "explore"},
        {"scoring", "score"}, {"scored", "score"},
        {"treating", "treat"}, {"treated", "treat"},
        {"repeating", "repeat"}, {"repeated", "repeat"},
        {"heating", "heat"}, {"heated", "heat"},
        {"defeating", "defeat"}, {"defeated", "defeat"},
        {"floating", "float"}, {"floated", "float"},
        {"stating", "state"}, {"stated", "state"},
        {"writing", "write"}, {"deleting", "delete"}, {"deleted", "delete"},
        {"completing", "complete"}, {"completed", "complete"},
        {"routing", "route"}, {"routed", "route"},
        {"noting", "note"}, {"noted", "note"},
        {"voting", "vote"}, {"voted", "vote"},
        {"timing", "time"}, {"timed", "time"},
        {"naming", "name"}, {"named", "name"},
        {"coming", "come"}, {"becoming", "become"},
        {"taking", "take"}, {"making", "make"}, {"giving", "give"},
        {"losing", "lose"}, {"choosing", "choose"}, {"leaving", "leave"},
        {"seed", "seed"}, {"speed", "speed"},
    };
    return table;
}

// Undo consonant doubling or restore a trailing -e after stripping -ing/-ed.
std::string fix_stripped_stem(const std::string& stem, const std::string& original) {
    if (stem.size() < 2) return original;
    std::size_t n = stem.size();
    char last = stem[n - 1];
    char prev = stem[n - 2];
    if (last == prev && is_letter_byte(static_cast<unsigned char>(last)) &&
        last != 'l' && last != 's' && last != 'z' && last != 'f' && last != 'e' &&
        last != 'o') {
        return stem.substr(0, n - 1);  // running -> runn -> run
    }
    auto vowel = [](char c) {
        return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u';
    };
    // managing -> manag -> manage; using -> us -> use; serving -> serv -> serve
    if ((last == 'c' || last == 'g' || last == 'u' || last == 'v' || last == 'z' ||
         (last == 's' && prev != 's')) &&
        !ends_with(stem, "ss")) {
        return stem + 'e';
    }
    // creating -> creat -> create (eat/heat/treat/float stay via table or length)
    if (n >= 5 && last == 't' && prev == 'a') return stem + 'e';
    // defining -> defin -> define (consonant before "in"; remain/obtain keep)
    if (n >= 4 && last == 'n' && prev == 'i' && !vowel(stem[n - 3])) return stem + 'e';
    // ensuring -> ensur -> ensure; requiring -> requir -> require
    if (n >= 4 && last == 'r' && (prev == 'u' || prev == 'i')) return stem + 'e';
    return stem;
}

}  // namespace

std::string lemmatize(const std::string& word) {
    std::string w = lower_ascii(word);
    if (w.empty()) return w;

    const auto& irregular = irregular_lemmas();
    if (auto it = irregular.find(w); it != irregular.end()) return it->second;

    if (ends_with(w, "'s")) {
        w = w.substr(0, w.size() - 2);
        if (auto it = irregular.find(w); it != irregular.end()) return it->second;
    }
    if (w.size() <= 2) return w;

    // plural / 3rd person singular -s
    if (ends_with(w, "ies") && w.size() >= 5) return w.substr(0, w.size() - 3) + 'y';
    if (ends_with(w, "sses") || ends_with(w, "ches") || ends_with(w, "shes") ||
        ends_with(w, "xes") || ends_with(w, "zes")) {
        return w.substr(0, w.size() - 2);
    }
    if (!ends_with(w, "ss") && !ends_with(w, "us") && !ends_with(w, "is") &&
        ends_with(w, "s") && w.size() >= 4) {
        return w.substr(0, w.size() - 1);
    }

    if (ends_with(w, "ing") && w.size() >= 5) {
        return fix_stripped_stem(w.substr(0, w.size() - 3), w);
    }
    if (ends_with(w, "ied") && w.size() >= 5) return w.substr(0, w.size() - 3) + 'y';
    if (ends_with(w, "eed")) return w;  // need, exceed, proceed, ...
    if (ends_with(w, "ed") && w.size() >= 4) {
        return fix_stripped_stem(w.substr(0, w.size() - 2), w);
    }
    return w;
}

namespace {

// --- POS tagging ------------------------------------------------------------

enum class ClosedClass { None, Determiner, Modal, To, BeForm, Other };

const std::unordered_map<std::string, ClosedClass>& closed_class_words() {
    static const std::unordered_map<std::string, ClosedClass> table = [] {
        std::unordered_map<std::string, ClosedClass> t;
        auto add = [&](std::initializer_list<const char*> words, ClosedClass cc) {
            for (const char* w : words) t.emplace(w, cc);
        };
        add({"the", "a", "an", "this", "that", "these", "those", "each", "every",
             "all", "some", "any", "no", "both", "either", "neither", "such",
             "another", "its", "his", "her", "their", "our", "your", "my"},
            ClosedClass::Determiner);
        add({"shall", "will", "would", "should", "could", "can", "may", "might",
             "must", "ought"},
            ClosedClass::Modal);
        add({"to"}, ClosedClass::To);
        add({"am", "is", "are", "was", "were", "be", "been", "being", "isn't",
             "aren't", "wasn't", "weren't"},
            ClosedClass::BeForm);
        add({"i", "you", "he", "she", "it", "we", "they", "me", "him", "us",
             "them", "mine", "yours", "hers", "ours", "theirs", "myself",
             "yourself", "himself", "herself", "itself", "ourselves",
             "themselves", "who", "whom", "whose", "which", "what", "whatever",
             "whichever", "everything", "anything", "nothing", "something",
             "everyone", "anyone", "someone", "nobody", "somebody", "everybody",
             "of", "in", "for", "with", "on", "at", "by", "from", "as", "into",
             "about", "between", "through", "during", "before", "after",
             "above", "below", "under", "over", "against", "among", "within",
             "without", "upon", "across", "behind", "beyond", "except", "via",
             "per", "onto", "toward", "towards", "until", "since", "off",
             "near", "around", "along", "amid", "despite", "unless",
             "and", "or", "but", "nor", "so", "yet", "if", "then", "than",
             "because", "while", "whether", "although", "though", "whereas",
             "not", "there", "here", "when", "where", "why", "how",
             "etc", "e.g", "i.e", "vs",
             "one", "two", "three", "four", "five", "six", "seven", "eight",
             "nine", "ten", "zero", "first", "second", "third",
             "more", "most", "much", "many", "few", "fewer", "less", "least",
             "several", "enough", "own", "same", "other", "others"},
            ClosedClass::Other);
        return t;
    }();
    return table;
}

const std::unordered_set<std::string>& adverb_words() {
    static const std::unordered_set<std::string> table = {
        "also",  "often",   "always", "never",  "sometimes", "usually",
        "again", "already", "just",   "still",  "soon",      "now",
        "too",   "quite",   "rather", "almost", "nearly",    "perhaps",
        "maybe", "once",    "twice",  "very",   "instead",   "away",
        "back",  "together", "well",  "however", "therefore", "thus",
        "hence", "moreover", "furthermore", "nevertheless", "otherwise",
        "meanwhile", "anymore", "forward", "backward"};
    return table;
}

// -ly words that are not adverbs.
const std::unordered_set<std::string>& ly_exceptions() {
    static const std::unordered_set<std::string> table = {
        "apply", "comply", "supply", "reply",  "rely",   "imply", "multiply",
        "fly",   "assembly", "family", "anomaly", "early", "italy", "likely",
        "only"};
    return table;
}

const std::unordered_set<std::string>& adjective_words() {
    static const std::unordered_set<std::string> table = {
        "new",      "good",     "bad",      "high",      "low",      "large",
        "small",    "big",      "long",     "short",     "full",     "empty",
        "available","valid",    "invalid",  "correct",   "incorrect","secure",
        "safe",     "main",     "primary",  "secondary", "current",  "previous",
        "next",     "last",     "initial",  "final",     "total",    "complete",
        "incomplete","necessary","optional","mandatory", "possible", "impossible",
        "ready",    "active",   "inactive", "open",      "external", "internal",
        "public",   "private",  "remote",   "local",     "digital",  "manual",
        "automatic","relevant", "entire",   "single",    "multiple", "separate",
        "specific", "additional","appropriate","different","common",  "normal"};
    return table;
}

// Base-form verbs frequent in requirements text; consulted only when the
// sentence still lacks a verb.
const std::unordered_set<std::string>& common_verbs() {
    static const std::unordered_set<std::string> table = {
        "provide", "support",  "include", "require",  "ensure",   "allow",
        "enable",  "display",  "store",   "send",     "receive",  "process",
        "manage",  "use",      "create",  "update",   "delete",   "remove",
        "add",     "contain",  "perform", "implement","define",   "specify",
        "verify",  "validate", "check",   "monitor",  "control",  "handle",
        "maintain","generate", "accept",  "reject",   "notify",   "log",
        "record",  "report",   "comply",  "respond",  "retrieve", "transmit",
        "encrypt", "decrypt",  "have",    "do",       "make",     "keep",
        "need",    "offer",    "give",    "take",     "run",      "apply"};
    return table;
}

bool has_adj_suffix(const std::string& w) {
    return w.size() >= 5 &&
           (ends_with(w, "ous") || ends_with(w, "ful") || ends_with(w, "less") ||
            ends_with(w, "able") || ends_with(w, "ible") || ends_with(w, "ish"));
}

bool has_noun_suffix(const std::string& w) {
    return w.size() >= 5 &&
           (ends_with(w, "tion") || ends_with(w, "sion") || ends_with(w, "ment") ||
            ends_with(w, "ness") || ends_with(w, "ity") || ends_with(w, "ance") ||
            ends_with(w, "ence") || ends_with(w, "ship") || ends_with(w, "ism") ||
            ends_with(w, "ure") || ends_with(w, "age") || ends_with(w, "ware"));
}

bool has_verb_suffix(const std::string& w) {
    return w.size() >= 5 &&
           (ends_with(w, "ize") || ends_with(w, "ise") || ends_with(w, "ify") ||
            ends_with(w, "izes") || ends_with(w, "ises") || ends_with(w, "ifies") ||
            ends_with(w, "ized") || ends_with(w, "ised") || ends_with(w, "ified"));
}

bool is_adverb_form(const std::string& w) {
    if (adverb_words().count(w)) return true;
    return w.size() >= 4 && ends_with(w, "ly") && !ly_exceptions().count(w) &&
           !ends_with(w, "ply");
}

// Sentence-level tagger state machine.
void tag_sentence(Sentence& sentence) {
    enum class Expect { None, Verb, Noun };
    Expect expect = Expect::None;
    bool has_verb = false;
    Pos prev_pos = Pos::Other;
    std::string prev_lower;

    const auto& closed = closed_class_words();
    const auto& irregular = irregular_lemmas();

    for (std::size_t i = 0; i < sentence.size(); ++i) {
        Token& tok = sentence[i];
        if (!has_letter(tok.surface)) {
            tok.pos = Pos::Other;
            expect = Expect::None;
            prev_pos = Pos::Other;
            prev_lower.clear();
            continue;
        }
        std::string w = lower_ascii(tok.surface);
        Pos pos;

        auto closed_it = closed.find(w);
        bool is_be = closed_it != closed.end() && closed_it->second == ClosedClass::BeForm;

        if (expect == Expect::Verb && w == "not") {
            pos = Pos::Other;  // "shall not compromise": keep expecting the verb
        } else if (expect == Expect::Verb && is_adverb_form(w)) {
            pos = Pos::Adv;  // "shall quickly respond"
        } else if (expect == Expect::Verb && closed_it == closed.end()) {
            pos = Pos::Verb;
            has_verb = true;
            expect = Expect::None;
        } else if (expect == Expect::Noun && closed_it == closed.end() &&
                   (adjective_words().count(w) || has_adj_suffix(w))) {
            pos = Pos::Adj;  // "the external interface": keep expecting the noun
        } else if (expect == Expect::Noun && closed_it == closed.end() &&
                   is_adverb_form(w)) {
            pos = Pos::Adv;
        } else if (expect == Expect::Noun && closed_it == closed.end()) {
            pos = Pos::Noun;
            expect = Expect::None;
        } else if (closed_it != closed.end()) {
            pos = Pos::Other;
            switch (closed_it->second) {
                case ClosedClass::Determiner: expect = Expect::Noun; break;
                case ClosedClass::Modal: expect = Expect::Verb; break;
                case ClosedClass::To: {
                    // infinitive marker unless followed by a determiner
                    bool next_det = false;
                    if (i + 1 < sentence.size()) {
                        auto nit = closed.find(lower_ascii(sentence[i + 1].surface));
                        next_det = nit != closed.end() &&
                                   nit->second == ClosedClass::Determiner;
                    }
                    expect = next_det ? Expect::None : Expect::Verb;
                    break;
                }
                default: expect = Expect::None; break;
            }
        } else if (auto it = irregular.find(w);
                   it != irregular.end() && !is_be &&
                   common_verbs().count(it->second)) {
            pos = Pos::Verb;
            has_verb = true;
        } else if (is_adverb_form(w)) {
            pos = Pos::Adv;
        } else if (adjective_words().count(w) || has_adj_suffix(w)) {
            pos = Pos::Adj;
        } else if (ends_with(w, "ing") && w.size() >= 5) {
            pos = (prev_lower == "the" || prev_lower == "a" || prev_lower == "an")
                      ? Pos::Noun
                      : Pos::Verb;
            if (pos == Pos::Verb) has_verb = true;
        } else if (has_verb_suffix(w)) {
            pos = Pos::Verb;
            has_verb = true;
        } else if (has_noun_suffix(w)) {
            pos = Pos::Noun;
        } else if (!has_verb && prev_pos == Pos::Noun &&
                   (ends_with(w, "s") || common_verbs().count(lemmatize(w)))) {
            // "The system reports errors": subject seen, no verb yet
            pos = Pos::Verb;
            has_verb = true;
        } else if (ends_with(w, "ed") && w.size() >= 4) {
            pos = Pos::Verb;
            has_verb = true;
        } else {
            pos = Pos::Noun;
        }

        tok.pos = pos;
        prev_pos = pos;
        prev_lower = w;
    }
}

// --- tokenizer / splitter ---------------------------------------------------

struct RawToken {
    std::string surface;
    std::size_t offset = 0;
    bool followed_by_blank_line = false;
};

std::vector<RawToken> tokenize_raw(const std::string& text) {
    std::vector<RawToken> tokens;
    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        unsigned char c = text[i];
        if (std::isspace(c)) {
            // mark a blank-line break on the previous token
            std::size_t newlines = 0;
            std::size_t j = i;
            while (j < n && std::isspace(static_cast<unsigned char>(text[j]))) {
                if (text[j] == '\n') ++newlines;
                ++j;
            }
            if (newlines >= 2 && !tokens.empty()) tokens.back().followed_by_blank_line = true;
            i = j;
            continue;
        }
        RawToken tok;
        tok.offset = i;
        if (is_alnum_byte(c)) {
            std::size_t j = i;
            while (j < n) {
                unsigned char cj = text[j];
                if (is_alnum_byte(cj)) {
                    ++j;
                } else if ((cj == '-' || cj == '\'') && j + 1 < n &&
                           is_alnum_byte(static_cast<unsigned char>(text[j + 1])) &&
                           j > i) {
                    ++j;  // hyphenated / possessive word
                } else if ((cj == '.' || cj == ',') && j > i && j + 1 < n &&
                           is_digit_byte(static_cast<unsigned char>(text[j + 1])) &&
                           is_digit_byte(static_cast<unsigned char>(text[j - 1]))) {
                    ++j;  // decimal or grouped number: 3.5, 10,000
                } else {
                    break;
                }
            }
            tok.surface = text.substr(i, j - i);
            i = j;
        } else {
            // run of the same punctuation char ("...", "---") is one token
            std::size_t j = i;
            while (j < n && text[j] == text[i]) ++j;
            tok.surface = text.substr(i, j - i);
            i = j;
        }
        tokens.push_back(std::move(tok));
    }
    return tokens;
}

const std::unordered_set<std::string>& abbreviations() {
    static const std::unordered_set<std::string> table = {
        "etc", "fig", "vs", "cf", "rev", "ver", "approx", "dept",
        "inc", "ltd", "co", "resp", "sec", "chap", "eq"};
    return table;
}

bool starts_sentence(const std::string& surface) {
    if (surface.empty()) return false;
    unsigned char c = surface[0];
    return std::isupper(c) || std::isdigit(c) || c == '"' || c == '(' || c >= 0x80;
}

std::vector<std::vector<RawToken>> split_sentences(const std::vector<RawToken>& tokens) {
    std::vector<std::vector<RawToken>> sentences;
    std::vector<RawToken> current;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const RawToken& tok = tokens[i];
        current.push_back(tok);
        bool boundary = false;
        if (tok.surface[0] == '.' || tok.surface[0] == '!' || tok.surface[0] == '?') {
            if (i + 1 == tokens.size()) {
                boundary = true;
            } else if (starts_sentence(tokens[i + 1].surface)) {
                bool abbrev = false;
                if (current.size() >= 2 && tok.surface == ".") {
                    const std::string prev = lower_ascii(current[current.size() - 2].surface);
                    abbrev = prev.size() >= 2 && abbreviations().count(prev) > 0;
                }
                boundary = !abbrev;
            }
        }
        if (tok.followed_by_blank_line) boundary = true;
        if (boundary) {
            sentences.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) sentences.push_back(std::move(current));
    return sentences;
}

}  // namespace

const char* pos_name(Pos pos) {
    switch (pos) {
        case Pos::Noun: return "NOUN";
        case Pos::Verb: return "VERB";
        case Pos::Adj: return "ADJ";
        case Pos::Adv: return "ADV";
        case Pos::Other: return "OTHER";
    }
    return "OTHER";
}

Pos pos_from_name(const std::string& name) {
    if (name == "NOUN") return Pos::Noun;
    if (name == "VERB") return Pos::Verb;
    if (name == "ADJ") return Pos::Adj;
    if (name == "ADV") return Pos::Adv;
    return Pos::Other;
}

std::size_t AnnotatedDocument::token_count() const {
    std::size_t n = 0;
    for (const auto& s : sentences) n += s.size();
    return n;
}

bool is_word(const Token& token) { return has_letter(token.surface); }

AnnotatedDocument parse_document(const std::string& text, const std::string& doc_id) {
    AnnotatedDocument doc;
    doc.doc_id = doc_id;
    doc.source_text = text;

    auto raw = tokenize_raw(text);
    if (raw.empty()) throw EmptyDocument(doc_id);

    for (auto& raw_sentence : split_sentences(raw)) {
        Sentence sentence;
        sentence.reserve(raw_sentence.size());
        for (auto& rt : raw_sentence) {
            Token tok;
            tok.surface = std::move(rt.surface);
            tok.char_offset = rt.offset;
            if (has_letter(tok.surface)) {
                tok.lemma = lemmatize(tok.surface);
            } else if (std::isdigit(static_cast<unsigned char>(tok.surface[0]))) {
                tok.lemma = tok.surface;
            }
            sentence.push_back(std::move(tok));
        }
        tag_sentence(sentence);
        doc.sentences.push_back(std::move(sentence));
    }
    return doc;
}

TermSet term_set(const AnnotatedDocument& doc) {
    TermSet out;
    for (const auto& sentence : doc.sentences) {
        for (const auto& tok : sentence) {
            if (is_word(tok)) out.lemmas.insert(tok.lemma);
        }
    }
    return out;
}

TermSet novel_terms(const TermSet& withheld, const TermSet& disclosed, const Wordlists& wl) {
    TermSet out;
    for (const auto& lemma : withheld.lemmas) {
        if (!disclosed.contains(lemma) && !wl.contains(lemma)) out.lemmas.insert(lemma);
    }
    return out;
}

std::string detokenize(const AnnotatedDocument& doc) {
    std::string out;
    for (std::size_t s = 0; s < doc.sentences.size(); ++s) {
        if (s) out += "\n\n";
        const Sentence& sentence = doc.sentences[s];
        for (std::size_t t = 0; t < sentence.size(); ++t) {
            if (t) out += ' ';
            out += sentence[t].surface;
        }
    }
    return out;
}

Wordlists Wordlists::from_words(const std::vector<std::string>& common_250,
                                const std::vector<std::string>& vague_stop) {
    Wordlists wl;
    for (const auto& w : common_250) wl.common_250_.insert(lemmatize(w));
    for (const auto& w : vague_stop) wl.vague_stop_.insert(lemmatize(w));
    wl.combined_ = wl.common_250_;
    wl.combined_.insert(wl.vague_stop_.begin(), wl.vague_stop_.end());
    return wl;
}

Wordlists Wordlists::load(const std::filesystem::path& common_250_path,
                          const std::filesystem::path& vague_stop_path) {
    return from_words(io::read_list_file(common_250_path),
                      io::read_list_file(vague_stop_path));
}

}  // namespace reqterm::text
