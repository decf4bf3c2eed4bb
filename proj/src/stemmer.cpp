#include "tlr/stemmer.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <string_view>
#include <vector>

namespace tlr {

// ---------------------------------------------------------------------------
// Porter stemmer (English)
// ---------------------------------------------------------------------------

namespace {

class PorterState {
public:
    explicit PorterState(std::string w) : b_(std::move(w)) {}

    std::string result() && { return std::move(b_); }

    bool is_consonant(std::size_t i) const {
        switch (b_[i]) {
            case 'a': case 'e': case 'i': case 'o': case 'u':
                return false;
            case 'y':
                return i == 0 ? true : !is_consonant(i - 1);
            default:
                return true;
        }
    }

    /// Measure of b_[0..end): number of VC sequences, [C](VC)^m[V].
    int measure(std::size_t end) const {
        int m = 0;
        std::size_t i = 0;
        while (i < end && is_consonant(i)) ++i;
        for (;;) {
            if (i >= end) return m;
            while (i < end && !is_consonant(i)) ++i;
            if (i >= end) return m;
            ++m;
            while (i < end && is_consonant(i)) ++i;
        }
    }

    bool has_vowel(std::size_t end) const {
        for (std::size_t i = 0; i < end; ++i)
            if (!is_consonant(i)) return true;
        return false;
    }

    bool ends_double_consonant() const {
        const std::size_t n = b_.size();
        return n >= 2 && b_[n - 1] == b_[n - 2] && is_consonant(n - 1);
    }

    /// cvc at position end-1, where the final c is not w, x or y.
    bool cvc(std::size_t end) const {
        if (end < 3) return false;
        if (!is_consonant(end - 3) || is_consonant(end - 2) || !is_consonant(end - 1))
            return false;
        const char c = b_[end - 1];
        return c != 'w' && c != 'x' && c != 'y';
    }

    bool ends(std::string_view suffix) const {
        return b_.size() >= suffix.size() &&
               std::string_view(b_).substr(b_.size() - suffix.size()) == suffix;
    }

    std::size_t stem_len(std::string_view suffix) const { return b_.size() - suffix.size(); }

    void replace(std::string_view suffix, std::string_view with) {
        b_.resize(b_.size() - suffix.size());
        b_.append(with);
    }

    std::string b_;
};

struct Rule {
    std::string_view suffix;
    std::string_view replacement;
};

// Longest matching suffix wins; its condition is then tested exactly once.
template <std::size_t N>
bool apply_rules(PorterState& s, const std::array<Rule, N>& rules, int min_measure) {
    const Rule* best = nullptr;
    for (const auto& r : rules) {
        if (s.ends(r.suffix) && (!best || r.suffix.size() > best->suffix.size())) best = &r;
    }
    if (!best) return false;
    if (s.measure(s.stem_len(best->suffix)) > min_measure) {
        s.replace(best->suffix, best->replacement);
        return true;
    }
    return false;
}

void porter_step1ab(PorterState& s) {
    if (s.ends("sses")) {
        s.replace("sses", "ss");
    } else if (s.ends("ies")) {
        s.replace("ies", "i");
    } else if (!s.ends("ss") && s.ends("s")) {
        s.replace("s", "");
    }

    bool vowel_rule_fired = false;
    if (s.ends("eed")) {
        if (s.measure(s.stem_len("eed")) > 0) s.replace("eed", "ee");
    } else if (s.ends("ed") && s.has_vowel(s.stem_len("ed"))) {
        s.replace("ed", "");
        vowel_rule_fired = true;
    } else if (s.ends("ing") && s.has_vowel(s.stem_len("ing"))) {
        s.replace("ing", "");
        vowel_rule_fired = true;
    }
    if (vowel_rule_fired) {
        if (s.ends("at")) {
            s.replace("at", "ate");
        } else if (s.ends("bl")) {
            s.replace("bl", "ble");
        } else if (s.ends("iz")) {
            s.replace("iz", "ize");
        } else if (s.ends_double_consonant()) {
            const char c = s.b_.back();
            if (c != 'l' && c != 's' && c != 'z') s.b_.pop_back();
        } else if (s.measure(s.b_.size()) == 1 && s.cvc(s.b_.size())) {
            s.b_.push_back('e');
        }
    }
}

void porter_step1c(PorterState& s) {
    if (s.ends("y") && s.has_vowel(s.stem_len("y"))) s.replace("y", "i");
}

constexpr std::array<Rule, 21> kStep2{{
    {"ational", "ate"}, {"tional", "tion"}, {"enci", "ence"}, {"anci", "ance"},
    {"izer", "ize"},    {"abli", "able"},   {"alli", "al"},   {"entli", "ent"},
    {"eli", "e"},       {"ousli", "ous"},   {"ization", "ize"}, {"ation", "ate"},
    {"ator", "ate"},    {"alism", "al"},    {"iveness", "ive"}, {"fulness", "ful"},
    {"ousness", "ous"}, {"aliti", "al"},    {"iviti", "ive"},  {"biliti", "ble"},
    {"logi", "log"},
}};

constexpr std::array<Rule, 7> kStep3{{
    {"icate", "ic"}, {"ative", ""}, {"alize", "al"}, {"iciti", "ic"},
    {"ical", "ic"},  {"ful", ""},   {"ness", ""},
}};

constexpr std::array<Rule, 18> kStep4{{
    {"al", ""},   {"ance", ""}, {"ence", ""}, {"er", ""},  {"ic", ""},  {"able", ""},
    {"ible", ""}, {"ant", ""},  {"ement", ""}, {"ment", ""}, {"ent", ""}, {"ou", ""},
    {"ism", ""},  {"ate", ""},  {"iti", ""},  {"ous", ""}, {"ive", ""}, {"ize", ""},
}};

void porter_step4(PorterState& s) {
    // "ion" only counts with a preceding s or t; handled before the generic table.
    if (s.ends("ion")) {
        const std::size_t stem = s.stem_len("ion");
        if (stem > 0 && (s.b_[stem - 1] == 's' || s.b_[stem - 1] == 't') &&
            s.measure(stem) > 1) {
            s.replace("ion", "");
        }
        return;
    }
    apply_rules(s, kStep4, 1);
}

void porter_step5(PorterState& s) {
    if (s.ends("e")) {
        const std::size_t stem = s.stem_len("e");
        const int m = s.measure(stem);
        if (m > 1 || (m == 1 && !s.cvc(stem))) s.replace("e", "");
    }
    if (s.ends_double_consonant() && s.b_.back() == 'l' && s.measure(s.b_.size() - 1) > 1) {
        s.b_.pop_back();
    }
}

}  // namespace

std::string porter_stem(const std::string& word) {
    if (word.size() <= 2) return word;
    PorterState s(word);
    porter_step1ab(s);
    porter_step1c(s);
    apply_rules(s, kStep2, 0);
    apply_rules(s, kStep3, 0);
    porter_step4(s);
    porter_step5(s);
    return std::move(s).result();
}

// ---------------------------------------------------------------------------
// Italian stemmer (Snowball family)
// ---------------------------------------------------------------------------

namespace {

// Internal representation: one char32_t per letter. Accented vowels keep their
// Latin-1 code points; U/I marked as consonants by the prelude are uppercased.
using ItWord = std::vector<char32_t>;

bool decode_utf8(const std::string& in, ItWord& out) {
    out.clear();
    std::size_t i = 0;
    while (i < in.size()) {
        const unsigned char c = in[i];
        if (c < 0x80) {
            out.push_back(c);
            ++i;
        } else if ((c >> 5) == 0x6 && i + 1 < in.size()) {
            out.push_back(((c & 0x1f) << 6) | (in[i + 1] & 0x3f));
            i += 2;
        } else if ((c >> 4) == 0xE && i + 2 < in.size()) {
            out.push_back(((c & 0x0f) << 12) | ((in[i + 1] & 0x3f) << 6) | (in[i + 2] & 0x3f));
            i += 3;
        } else {
            return false;  // unsupported sequence; caller passes the word through
        }
    }
    return true;
}

std::string encode_utf8(const ItWord& w) {
    std::string out;
    for (char32_t c : w) {
        if (c < 0x80) {
            out.push_back(static_cast<char>(c));
        } else if (c < 0x800) {
            out.push_back(static_cast<char>(0xC0 | (c >> 6)));
            out.push_back(static_cast<char>(0x80 | (c & 0x3f)));
        } else {
            out.push_back(static_cast<char>(0xE0 | (c >> 12)));
            out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3f)));
            out.push_back(static_cast<char>(0x80 | (c & 0x3f)));
        }
    }
    return out;
}

bool it_vowel(char32_t c) {
    switch (c) {
        case U'a': case U'e': case U'i': case U'o': case U'u':
        case 0xE0: case 0xE8: case 0xEC: case 0xF2: case 0xF9:  // à è ì ò ù
            return true;
        default:
            return false;
    }
}

// Acute accents become grave; u after q and u/i between vowels become
// uppercase (treated as consonants from then on).
void it_prelude(ItWord& w) {
    for (auto& c : w) {
        switch (c) {
            case 0xE1: c = 0xE0; break;  // á → à
            case 0xE9: c = 0xE8; break;  // é → è
            case 0xED: c = 0xEC; break;  // í → ì
            case 0xF3: c = 0xF2; break;  // ó → ò
            case 0xFA: c = 0xF9; break;  // ú → ù
            default: break;
        }
    }
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (w[i] == U'u' && i > 0 && w[i - 1] == U'q') {
            w[i] = U'U';
        } else if ((w[i] == U'u' || w[i] == U'i') && i > 0 && i + 1 < w.size() &&
                   it_vowel(w[i - 1]) && it_vowel(w[i + 1])) {
            w[i] = w[i] == U'u' ? U'U' : U'I';
        }
    }
}

// RV per the Snowball definition.
std::size_t it_rv(const ItWord& w) {
    const std::size_t n = w.size();
    if (n < 3) return n;
    if (!it_vowel(w[1])) {
        // next vowel after position 1
        for (std::size_t i = 2; i < n; ++i)
            if (it_vowel(w[i])) return i + 1;
        return n;
    }
    if (it_vowel(w[0]) && it_vowel(w[1])) {
        for (std::size_t i = 2; i < n; ++i)
            if (!it_vowel(w[i])) return i + 1;
        return n;
    }
    return 3;
}

// R1: after the first consonant following a vowel, scanning from `from`.
std::size_t it_region(const ItWord& w, std::size_t from) {
    const std::size_t n = w.size();
    for (std::size_t i = from; i + 1 < n; ++i) {
        if (it_vowel(w[i]) && !it_vowel(w[i + 1])) return i + 2;
    }
    return n;
}

struct ItState {
    ItWord w;
    std::size_t rv, r1, r2;

    std::size_t size() const { return w.size(); }

    bool ends(std::u32string_view s) const {
        if (w.size() < s.size()) return false;
        return std::equal(s.begin(), s.end(), w.end() - s.size());
    }

    bool in_rv(std::size_t suffix_len) const { return w.size() - suffix_len >= rv; }
    bool in_r1(std::size_t suffix_len) const { return w.size() - suffix_len >= r1; }
    bool in_r2(std::size_t suffix_len) const { return w.size() - suffix_len >= r2; }

    void drop(std::size_t n) { w.resize(w.size() - n); }
};

// Longest suffix from `list` that the word ends with; npos when none.
std::size_t longest_match(const ItState& s, const std::vector<std::u32string_view>& list) {
    std::size_t best = std::u32string_view::npos;
    std::size_t best_len = 0;
    for (std::size_t i = 0; i < list.size(); ++i) {
        if (list[i].size() > best_len && s.ends(list[i])) {
            best = i;
            best_len = list[i].size();
        }
    }
    return best;
}

const std::vector<std::u32string_view>& it_pronouns() {
    static const std::vector<std::u32string_view> v{
        U"gliela", U"gliele", U"glieli", U"glielo", U"gliene", U"sene",
        U"mela", U"mele", U"meli", U"melo", U"mene", U"tela", U"tele", U"teli",
        U"telo", U"tene", U"cela", U"cele", U"celi", U"celo", U"cene", U"vela",
        U"vele", U"veli", U"velo", U"vene", U"gli", U"ci", U"la", U"le", U"li",
        U"lo", U"mi", U"ne", U"si", U"ti", U"vi"};
    return v;
}

void it_step0(ItState& s) {
    const auto idx = longest_match(s, it_pronouns());
    if (idx == std::u32string_view::npos) return;
    const std::size_t plen = it_pronouns()[idx].size();
    if (!s.in_rv(plen)) return;

    const ItWord& w = s.w;
    const std::size_t stem = w.size() - plen;
    auto preceded_by = [&](std::u32string_view p) {
        if (stem < p.size()) return false;
        if (!std::equal(p.begin(), p.end(), w.begin() + (stem - p.size()))) return false;
        return w.size() - plen - p.size() >= s.rv;  // the marker must be in RV too
    };
    if (preceded_by(U"ando") || preceded_by(U"endo")) {
        s.drop(plen);
    } else if (preceded_by(U"ar") || preceded_by(U"er") || preceded_by(U"ir")) {
        s.drop(plen);
        s.w.push_back(U'e');
    }
}

bool it_step1(ItState& s) {
    struct Suffix {
        std::u32string_view text;
        int action;  // 0: delete in R2; 1: →log; 2: →u; 3: →ente; 4: delete in RV; 5: amente; 6: ità; 7: ivo-family; 8: azione-family
    };
    static const std::vector<Suffix> suffixes{
        {U"atrice", 0}, {U"atrici", 0}, {U"azione", 8}, {U"azioni", 8}, {U"uzione", 2},
        {U"uzioni", 2}, {U"usione", 2}, {U"usioni", 2}, {U"amento", 4}, {U"amenti", 4},
        {U"imento", 4}, {U"imenti", 4}, {U"amente", 5}, {U"abile", 0}, {U"abili", 0},
        {U"ibile", 0}, {U"ibili", 0}, {U"mente", 0}, {U"atore", 8}, {U"atori", 8},
        {U"logia", 1}, {U"logie", 1}, {U"anza", 0}, {U"anze", 0}, {U"iche", 0},
        {U"ichi", 0}, {U"ismo", 0}, {U"ismi", 0}, {U"ista", 0}, {U"iste", 0},
        {U"isti", 0}, {U"istà", 0}, {U"istè", 0}, {U"istì", 0}, {U"ante", 0},
        {U"anti", 0}, {U"enza", 3}, {U"enze", 3}, {U"ico", 0}, {U"ici", 0}, {U"ica", 0},
        {U"ice", 0}, {U"oso", 0}, {U"osi", 0}, {U"osa", 0}, {U"ose", 0}, {U"ità", 6},
        {U"ivo", 7}, {U"ivi", 7}, {U"iva", 7}, {U"ive", 7},
    };

    std::size_t best = std::u32string_view::npos;
    for (std::size_t i = 0; i < suffixes.size(); ++i) {
        if (s.ends(suffixes[i].text) &&
            (best == std::u32string_view::npos ||
             suffixes[i].text.size() > suffixes[best].text.size())) {
            best = i;
        }
    }
    if (best == std::u32string_view::npos) return false;
    const Suffix& suf = suffixes[best];
    const std::size_t len = suf.text.size();

    auto delete_if_r2 = [&](std::size_t n) {
        if (s.in_r2(n)) {
            s.drop(n);
            return true;
        }
        return false;
    };

    switch (suf.action) {
        case 0:
            return delete_if_r2(len);
        case 1:  // logia/logie → log
            if (s.in_r2(len)) {
                s.drop(len - 3);
                return true;
            }
            return false;
        case 2:  // uzione... → u
            if (s.in_r2(len)) {
                s.drop(len - 1);
                return true;
            }
            return false;
        case 3:  // enza/enze → ente
            if (s.in_r2(len)) {
                s.drop(len);
                s.w.insert(s.w.end(), {U'e', U'n', U't', U'e'});
                return true;
            }
            return false;
        case 4:  // amento family, RV condition
            if (s.in_rv(len)) {
                s.drop(len);
                return true;
            }
            return false;
        case 5: {  // amente, R1; then iv(at)? / os / ic / abil in R2
            if (!s.in_r1(len)) return false;
            s.drop(len);
            if (s.ends(U"iv") && s.in_r2(2)) {
                s.drop(2);
                if (s.ends(U"at") && s.in_r2(2)) s.drop(2);
            } else if ((s.ends(U"os") || s.ends(U"ic")) && s.in_r2(2)) {
                s.drop(2);
            } else if (s.ends(U"abil") && s.in_r2(4)) {
                s.drop(4);
            }
            return true;
        }
        case 6: {  // ità, R2; then abil / ic / iv in R2
            if (!delete_if_r2(len)) return false;
            if (s.ends(U"abil") && s.in_r2(4)) s.drop(4);
            else if (s.ends(U"ic") && s.in_r2(2)) s.drop(2);
            else if (s.ends(U"iv") && s.in_r2(2)) s.drop(2);
            return true;
        }
        case 7: {  // ivo family, R2; then at in R2 (then ic in R2)
            if (!delete_if_r2(len)) return false;
            if (s.ends(U"at") && s.in_r2(2)) {
                s.drop(2);
                if (s.ends(U"ic") && s.in_r2(2)) s.drop(2);
            }
            return true;
        }
        case 8: {  // azione family, R2; then ic in R2
            if (!delete_if_r2(len)) return false;
            if (s.ends(U"ic") && s.in_r2(2)) s.drop(2);
            return true;
        }
        default:
            return false;
    }
}

void it_step2(ItState& s) {
    static const std::vector<std::u32string_view> verbs{
        U"erebbero", U"irebbero", U"assero", U"assimo", U"eranno", U"erebbe",
        U"eremmo", U"ereste", U"eresti", U"essero", U"iranno", U"irebbe", U"iremmo",
        U"ireste", U"iresti", U"iscano", U"iscono", U"issero", U"arono", U"avamo",
        U"avano", U"avate", U"eremo", U"erete", U"erono", U"evamo", U"evano",
        U"evate", U"iremo", U"irete", U"irono", U"ivamo", U"ivano", U"ivate",
        U"ammo", U"ando", U"asse", U"assi", U"emmo", U"enda", U"ende", U"endi",
        U"endo", U"erà", U"erai", U"erei", U"erò", U"immo", U"irà", U"irai",
        U"irei", U"irò", U"isca", U"isce", U"isci", U"isco", U"Yamo", U"iamo",
        U"ano", U"are", U"ata", U"ate", U"ati", U"ato", U"ava", U"avi", U"avo",
        U"erà", U"ere", U"eva", U"evi", U"evo", U"irà", U"ire", U"ita",
        U"ite", U"iti", U"ito", U"iva", U"ivi", U"ivo", U"ono", U"uta", U"ute",
        U"uti", U"uto", U"ar", U"ir"};
    const auto idx = longest_match(s, verbs);
    if (idx == std::u32string_view::npos) return;
    const std::size_t len = verbs[idx].size();
    if (s.in_rv(len)) s.drop(len);
}

void it_step3(ItState& s) {
    // 3a: final vowel (and a preceding i), both in RV
    static const std::u32string_view finals = U"aeioàèìò";
    if (!s.w.empty() && finals.find(s.w.back()) != std::u32string_view::npos &&
        s.in_rv(1)) {
        s.drop(1);
        if (!s.w.empty() && s.w.back() == U'i' && s.in_rv(1)) s.drop(1);
    }
    // 3b: ch → c, gh → g in RV
    if ((s.ends(U"ch") || s.ends(U"gh")) && s.in_rv(2)) s.drop(1);
}

void it_postlude(ItWord& w) {
    for (auto& c : w) {
        if (c == U'U') c = U'u';
        else if (c == U'I') c = U'i';
    }
}

}  // namespace

std::string italian_stem(const std::string& word) {
    ItWord w;
    if (!decode_utf8(word, w) || w.size() <= 2) return word;
    it_prelude(w);

    ItState s;
    s.rv = it_rv(w);
    s.r1 = it_region(w, 0);
    s.r2 = it_region(w, s.r1);
    s.w = std::move(w);

    it_step0(s);
    if (!it_step1(s)) it_step2(s);
    it_step3(s);
    it_postlude(s.w);
    return encode_utf8(s.w);
}

}  // namespace tlr
