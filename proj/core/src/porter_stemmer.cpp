// Porter (1980) suffix stripping, following the reference implementation that
// Lucene's PorterStemFilter ports (including its "bli" and "logi" rules).

#include <string>
#include <string_view>

#include "cohort/text_analysis.hpp"

namespace cohort {

namespace {

class PorterStemmer {
  public:
    explicit PorterStemmer(std::string_view word) : m_b(word), m_k(static_cast<int>(word.size()) - 1)
    {}

    std::string run()
    {
        if (m_k <= 1) {
            return m_b;
        }
        step1ab();
        if (m_k > 0) {
            step1c();
            step2();
            step3();
            step4();
            step5();
        }
        return m_b.substr(0, static_cast<std::size_t>(m_k + 1));
    }

  private:
    [[nodiscard]] char at(int i) const { return m_b[static_cast<std::size_t>(i)]; }

    [[nodiscard]] bool cons(int i) const
    {
        switch (at(i)) {
        case 'a':
        case 'e':
        case 'i':
        case 'o':
        case 'u':
            return false;
        case 'y':
            return i == 0 ? true : !cons(i - 1);
        default:
            return true;
        }
    }

    // Number of VC sequences in b[0..j].
    [[nodiscard]] int measure() const
    {
        int n = 0;
        int i = 0;
        while (true) {
            if (i > m_j) {
                return n;
            }
            if (!cons(i)) {
                break;
            }
            ++i;
        }
        ++i;
        while (true) {
            while (true) {
                if (i > m_j) {
                    return n;
                }
                if (cons(i)) {
                    break;
                }
                ++i;
            }
            ++i;
            ++n;
            while (true) {
                if (i > m_j) {
                    return n;
                }
                if (!cons(i)) {
                    break;
                }
                ++i;
            }
            ++i;
        }
    }

    [[nodiscard]] bool vowel_in_stem() const
    {
        for (int i = 0; i <= m_j; ++i) {
            if (!cons(i)) {
                return true;
            }
        }
        return false;
    }

    [[nodiscard]] bool double_consonant(int i) const
    {
        return i >= 1 && at(i) == at(i - 1) && cons(i);
    }

    // consonant-vowel-consonant ending at i, where the last consonant is not w, x or y.
    [[nodiscard]] bool cvc(int i) const
    {
        if (i < 2 || !cons(i) || cons(i - 1) || !cons(i - 2)) {
            return false;
        }
        char ch = at(i);
        return ch != 'w' && ch != 'x' && ch != 'y';
    }

    bool ends(std::string_view suffix)
    {
        auto len = static_cast<int>(suffix.size());
        if (len > m_k + 1) {
            return false;
        }
        if (std::string_view(m_b).substr(static_cast<std::size_t>(m_k + 1 - len), suffix.size()) !=
            suffix) {
            return false;
        }
        m_j = m_k - len;
        return true;
    }

    void set_to(std::string_view replacement)
    {
        m_b.replace(static_cast<std::size_t>(m_j + 1), std::string::npos, replacement);
        m_k = m_j + static_cast<int>(replacement.size());
    }

    void replace_if_measured(std::string_view replacement)
    {
        if (measure() > 0) {
            set_to(replacement);
        }
    }

    void truncate()
    {
        m_b.resize(static_cast<std::size_t>(m_k + 1));
    }

    // Plurals and -ed / -ing.
    void step1ab()
    {
        if (at(m_k) == 's') {
            if (ends("sses")) {
                m_k -= 2;
            } else if (ends("ies")) {
                set_to("i");
            } else if (at(m_k - 1) != 's') {
                --m_k;
            }
        }
        truncate();
        if (ends("eed")) {
            if (measure() > 0) {
                --m_k;
            }
        } else if ((ends("ed") || ends("ing")) && vowel_in_stem()) {
            m_k = m_j;
            truncate();
            if (ends("at")) {
                set_to("ate");
            } else if (ends("bl")) {
                set_to("ble");
            } else if (ends("iz")) {
                set_to("ize");
            } else if (double_consonant(m_k)) {
                --m_k;
                char ch = at(m_k);
                if (ch == 'l' || ch == 's' || ch == 'z') {
                    ++m_k;
                }
            } else if (m_j = m_k; measure() == 1 && cvc(m_k)) {
                set_to("e");
            }
        }
        truncate();
    }

    // Terminal y to i when there is another vowel in the stem.
    void step1c()
    {
        if (ends("y") && vowel_in_stem()) {
            m_b[static_cast<std::size_t>(m_k)] = 'i';
        }
    }

    bool rule(std::string_view suffix, std::string_view replacement)
    {
        if (!ends(suffix)) {
            return false;
        }
        replace_if_measured(replacement);
        return true;
    }

    // Double suffixes to single ones, e.g. -ization to -ize.
    void step2()
    {
        if (m_k < 1) {
            return;
        }
        switch (at(m_k - 1)) {
        case 'a':
            rule("ational", "ate") || rule("tional", "tion");
            break;
        case 'c':
            rule("enci", "ence") || rule("anci", "ance");
            break;
        case 'e':
            rule("izer", "ize");
            break;
        case 'l':
            rule("bli", "ble") || rule("alli", "al") || rule("entli", "ent") || rule("eli", "e") ||
                rule("ousli", "ous");
            break;
        case 'o':
            rule("ization", "ize") || rule("ation", "ate") || rule("ator", "ate");
            break;
        case 's':
            rule("alism", "al") || rule("iveness", "ive") || rule("fulness", "ful") ||
                rule("ousness", "ous");
            break;
        case 't':
            rule("aliti", "al") || rule("iviti", "ive") || rule("biliti", "ble");
            break;
        case 'g':
            rule("logi", "log");
            break;
        default:
            break;
        }
        truncate();
    }

    // -ic-, -full, -ness etc.
    void step3()
    {
        switch (at(m_k)) {
        case 'e':
            rule("icate", "ic") || rule("ative", "") || rule("alize", "al");
            break;
        case 'i':
            rule("iciti", "ic");
            break;
        case 'l':
            rule("ical", "ic") || rule("ful", "");
            break;
        case 's':
            rule("ness", "");
            break;
        default:
            break;
        }
        truncate();
    }

    // Strips -ant, -ence etc. in context <c>vcvc<v>.
    void step4()
    {
        if (m_k < 1) {
            return;
        }
        bool matched = false;
        switch (at(m_k - 1)) {
        case 'a':
            matched = ends("al");
            break;
        case 'c':
            matched = ends("ance") || ends("ence");
            break;
        case 'e':
            matched = ends("er");
            break;
        case 'i':
            matched = ends("ic");
            break;
        case 'l':
            matched = ends("able") || ends("ible");
            break;
        case 'n':
            matched = ends("ant") || ends("ement") || ends("ment") || ends("ent");
            break;
        case 'o':
            if (ends("ion") && m_j >= 0 && (at(m_j) == 's' || at(m_j) == 't')) {
                matched = true;
            } else {
                matched = ends("ou");
            }
            break;
        case 's':
            matched = ends("ism");
            break;
        case 't':
            matched = ends("ate") || ends("iti");
            break;
        case 'u':
            matched = ends("ous");
            break;
        case 'v':
            matched = ends("ive");
            break;
        case 'z':
            matched = ends("ize");
            break;
        default:
            break;
        }
        if (matched && measure() > 1) {
            m_k = m_j;
            truncate();
        }
    }

    // Final -e and -ll.
    void step5()
    {
        m_j = m_k;
        if (at(m_k) == 'e') {
            int a = measure();
            if (a > 1 || (a == 1 && !cvc(m_k - 1))) {
                --m_k;
            }
        }
        if (at(m_k) == 'l' && double_consonant(m_k) && measure() > 1) {
            --m_k;
        }
        truncate();
    }

    std::string m_b;
    int m_k;
    int m_j = 0;
};

}  // namespace

std::string stem(std::string_view word)
{
    return PorterStemmer(word).run();
}

}  // namespace cohort
