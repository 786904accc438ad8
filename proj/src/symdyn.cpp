#include "irslab/symdyn.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <deque>
#include <map>
#include <numeric>
#include <sstream>

#include "irslab/error.hpp"
#include "irslab/rng.hpp"

namespace irslab::symdyn {

namespace {

void check_word(const Word& w, int alphabetSize, const std::string& what) {
    for (char c : w)
        require(c >= '0' && letter_value(c) < alphabetSize, ErrorKind::InvalidArgument,
                what + ": letter '" + std::string(1, c) + "' outside alphabet");
}

int positive_mod(int a, int m) { return ((a % m) + m) % m; }

}  // namespace

void SubshiftFamily::validate() const {
    require(alphabetSize >= 2 && alphabetSize <= 10, ErrorKind::InvalidArgument,
            "alphabet size must be in [2, 10]");
    for (const auto& s : samples) {
        require(!s.empty(), ErrorKind::InvalidArgument, "empty sample word");
        check_word(s, alphabetSize, "sample");
    }
}

Word thue_morse(std::size_t n) {
    Word w(n, '0');
    for (std::size_t i = 0; i < n; ++i) w[i] = letter_char(std::popcount(i) & 1);
    return w;
}

SubshiftFamily thue_morse_family(const std::vector<std::size_t>& lengths) {
    SubshiftFamily fam;
    for (auto n : lengths) fam.samples.push_back(thue_morse(n));
    return fam;
}

std::set<Word> factor_set(const SubshiftFamily& fam, int L) {
    require(L >= 1, ErrorKind::InvalidArgument, "factor length must be >= 1");
    std::set<Word> out;
    for (const auto& s : fam.samples)
        for (std::size_t i = 0; i + L <= s.size(); ++i) out.insert(s.substr(i, L));
    return out;
}

bool admits(const Word& w, const SubshiftFamily& fam) {
    return std::any_of(fam.samples.begin(), fam.samples.end(),
                       [&](const Word& s) { return s.find(w) != Word::npos; });
}

BlockGraph block_graph(const SubshiftFamily& fam, int L) {
    require(L >= 2, ErrorKind::InvalidArgument, "window length must be >= 2");
    const auto nodeSet = factor_set(fam, L - 1);
    BlockGraph g;
    g.nodes.assign(nodeSet.begin(), nodeSet.end());
    g.out.resize(g.nodes.size());
    std::map<Word, int> index;
    for (std::size_t i = 0; i < g.nodes.size(); ++i) index[g.nodes[i]] = static_cast<int>(i);
    for (const auto& e : factor_set(fam, L)) {
        const int from = index.at(e.substr(0, L - 1));
        const int to = index.at(e.substr(1));
        g.out[from].emplace_back(to, e.back());
    }
    for (auto& o : g.out)
        std::sort(o.begin(), o.end(), [](auto a, auto b) { return a.second < b.second; });
    return g;
}

bool sft_nonempty(const SubshiftFamily& fam, int L) {
    // Repeatedly discard vertices without incoming or outgoing edges; a cycle survives.
    const auto g = block_graph(fam, L);
    const std::size_t n = g.nodes.size();
    std::vector<int> indeg(n, 0), outdeg(n, 0);
    std::vector<std::vector<int>> in(n);
    for (std::size_t v = 0; v < n; ++v)
        for (auto [w, c] : g.out[v]) {
            ++indeg[w];
            ++outdeg[v];
            in[w].push_back(static_cast<int>(v));
        }
    std::vector<bool> alive(n, true);
    std::deque<int> queue;
    for (std::size_t v = 0; v < n; ++v)
        if (indeg[v] == 0 || outdeg[v] == 0) queue.push_back(static_cast<int>(v));
    std::size_t removed = 0;
    while (!queue.empty()) {
        const int v = queue.front();
        queue.pop_front();
        if (!alive[v]) continue;
        alive[v] = false;
        ++removed;
        for (auto [w, c] : g.out[v])
            if (alive[w] && --indeg[w] == 0) queue.push_back(w);
        for (int u : in[v])
            if (alive[u] && --outdeg[u] == 0) queue.push_back(u);
    }
    return removed < n;
}

std::optional<Word> find_periodic(const SubshiftFamily& fam, int L, int Pmax) {
    require(Pmax >= 1, ErrorKind::InvalidArgument, "Pmax must be >= 1");
    const auto g = block_graph(fam, L);
    const int n = static_cast<int>(g.nodes.size());
    if (n == 0) return std::nullopt;

    // Shortest cycle length through the graph: BFS from every vertex back to itself.
    int period = Pmax + 1;
    for (int s = 0; s < n; ++s) {
        std::vector<int> dist(n, -1);
        std::deque<int> queue;
        for (auto [w, c] : g.out[s])
            if (dist[w] < 0) {
                dist[w] = 1;
                queue.push_back(w);
            }
        while (!queue.empty()) {
            const int v = queue.front();
            queue.pop_front();
            if (v == s || dist[v] >= period) continue;
            for (auto [w, c] : g.out[v])
                if (dist[w] < 0) {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
        }
        if (dist[s] > 0) period = std::min(period, dist[s]);
    }
    if (period > Pmax) return std::nullopt;

    // For each start vertex, the lexicographically least closed walk of that exact length,
    // read as its appended letters, is built greedily with exact-length reachability.
    std::optional<Word> best;
    for (int s = 0; s < n; ++s) {
        std::vector<std::vector<char>> reach(period + 1, std::vector<char>(n, 0));
        reach[0][s] = 1;
        for (int k = 1; k <= period; ++k)
            for (int v = 0; v < n; ++v)
                for (auto [w, c] : g.out[v])
                    if (reach[k - 1][w]) {
                        reach[k][v] = 1;
                        break;
                    }
        if (!reach[period][s]) continue;
        Word walk;
        int v = s;
        for (int k = period; k > 0; --k) {
            for (auto [w, c] : g.out[v])
                if (reach[k - 1][w]) {
                    walk.push_back(c);
                    v = w;
                    break;
                }
        }
        Word least = walk;
        for (int r = 1; r < period; ++r) least = std::min(least, walk.substr(r) + walk.substr(0, r));
        if (!best || least < *best) best = least;
    }
    return best;
}

bool periodic_admissible(const Word& w, const SubshiftFamily& fam, int L) {
    if (w.empty()) return false;
    const std::size_t p = w.size();
    Word rep;
    while (rep.size() < p + static_cast<std::size_t>(L)) rep += w;
    for (int len = 1; len <= L; ++len)
        for (std::size_t i = 0; i < p; ++i)
            if (!admits(rep.substr(i, len), fam)) return false;
    return true;
}

WindowWord::WindowWord(Word w, int offset) : letters(std::move(w)), offsetOfZero(offset) {
    require(!letters.empty(), ErrorKind::InvalidArgument, "empty window");
    require(offset >= 0 && offset < size(), ErrorKind::InvalidArgument, "offsetOfZero outside window");
}

WindowWord WindowWord::centered(Word w) {
    const int off = static_cast<int>(w.size()) / 2;
    return WindowWord(std::move(w), off);
}

char WindowWord::at(int i) const {
    require(i >= first() && i <= last(), ErrorKind::OutOfWindow,
            "position " + std::to_string(i) + " outside window");
    return letters[offsetOfZero + i];
}

void validate(const ShiftMeasure& m) {
    auto check_prob = [](const std::vector<double>& p, const std::string& what) {
        require(p.size() >= 2 && p.size() <= 10, ErrorKind::InvalidArgument, what + ": need 2..10 letters");
        double s = 0;
        for (double x : p) {
            require(x >= 0 && std::isfinite(x), ErrorKind::InvalidArgument, what + ": negative entry");
            s += x;
        }
        require(std::abs(s - 1) <= 1e-12, ErrorKind::InvalidArgument, what + ": does not sum to 1");
    };
    if (auto b = std::get_if<Bernoulli>(&m)) {
        check_prob(b->p, "Bernoulli");
    } else if (auto mk = std::get_if<Markov>(&m)) {
        const std::size_t n = mk->P.size();
        for (const auto& row : mk->P) {
            require(row.size() == n, ErrorKind::InvalidArgument, "Markov: P not square");
            check_prob(row, "Markov row");
        }
        require(mk->pi.size() == n, ErrorKind::InvalidArgument, "Markov: pi has wrong size");
        check_prob(mk->pi, "Markov pi");
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0;
            for (std::size_t i = 0; i < n; ++i) s += mk->pi[i] * mk->P[i][j];
            require(std::abs(s - mk->pi[j]) <= 1e-9, ErrorKind::InvalidArgument, "Markov: pi P != pi");
        }
    } else {
        const auto& w = std::get<PeriodicOrbit>(m).word;
        require(!w.empty(), ErrorKind::InvalidArgument, "PeriodicOrbit: empty word");
        check_word(w, 10, "PeriodicOrbit");
    }
}

double marginal(const ShiftMeasure& m, int a) {
    if (auto b = std::get_if<Bernoulli>(&m)) return a < static_cast<int>(b->p.size()) ? b->p[a] : 0.0;
    if (auto mk = std::get_if<Markov>(&m)) return a < static_cast<int>(mk->pi.size()) ? mk->pi[a] : 0.0;
    const auto& w = std::get<PeriodicOrbit>(m).word;
    return static_cast<double>(std::count(w.begin(), w.end(), letter_char(a))) / w.size();
}

namespace {

int categorical(Rng& rng, const std::vector<double>& p) {
    const double u = rng.uniform();
    double acc = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        acc += p[i];
        if (u < acc) return static_cast<int>(i);
    }
    // rounding: fall back to the last letter with positive mass
    for (std::size_t i = p.size(); i-- > 0;)
        if (p[i] > 0) return static_cast<int>(i);
    return 0;
}

}  // namespace

WindowWord sample_window(const ShiftMeasure& m, int length, std::uint64_t seed) {
    require(length >= 1, ErrorKind::InvalidArgument, "window length must be >= 1");
    validate(m);
    Rng rng(seed);
    Word w(length, '0');
    if (auto b = std::get_if<Bernoulli>(&m)) {
        for (auto& c : w) c = letter_char(categorical(rng, b->p));
    } else if (auto mk = std::get_if<Markov>(&m)) {
        int s = categorical(rng, mk->pi);
        w[0] = letter_char(s);
        for (int i = 1; i < length; ++i) {
            s = categorical(rng, mk->P[s]);
            w[i] = letter_char(s);
        }
    } else {
        const auto& p = std::get<PeriodicOrbit>(m).word;
        const std::size_t phase = rng.below(p.size());
        for (int i = 0; i < length; ++i) w[i] = p[(phase + i) % p.size()];
    }
    return WindowWord::centered(std::move(w));
}

WindowWord shift(const WindowWord& w, int k) {
    const long off = static_cast<long>(w.offsetOfZero) + k;
    require(off >= 0 && off < w.size(), ErrorKind::OutOfWindow,
            "shift by " + std::to_string(k) + " leaves the window");
    return WindowWord(w.letters, static_cast<int>(off));
}

FreeWord::FreeWord(std::vector<int> letters) {
    letters_.reserve(letters.size());
    for (int x : letters) {
        require(x != 0, ErrorKind::InvalidArgument, "free-group letter 0");
        if (!letters_.empty() && letters_.back() == -x)
            letters_.pop_back();
        else
            letters_.push_back(x);
    }
}

FreeWord FreeWord::inverse() const {
    FreeWord r;
    r.letters_.assign(letters_.rbegin(), letters_.rend());
    for (auto& x : r.letters_) x = -x;
    return r;
}

FreeWord FreeWord::power(int k) const {
    const FreeWord base = k >= 0 ? *this : inverse();
    FreeWord r;
    for (int i = 0; i < std::abs(k); ++i) r = r * base;
    return r;
}

FreeWord operator*(const FreeWord& a, const FreeWord& b) {
    std::vector<int> v = a.letters_;
    std::size_t j = 0;
    while (!v.empty() && j < b.letters_.size() && v.back() == -b.letters_[j]) {
        v.pop_back();
        ++j;
    }
    v.insert(v.end(), b.letters_.begin() + j, b.letters_.end());
    FreeWord r;
    r.letters_ = std::move(v);
    return r;
}

std::string FreeWord::str() const {
    if (letters_.empty()) return "1";
    std::ostringstream os;
    for (std::size_t i = 0; i < letters_.size(); ++i) {
        if (i) os << ' ';
        os << "f" << (std::abs(letters_[i]) - 1);
        if (letters_[i] < 0) os << "^-1";
    }
    return os.str();
}

FreeWord parse_free_word(const std::string& text) {
    std::istringstream in(text);
    std::string tok;
    std::vector<int> letters;
    while (in >> tok) {
        if (tok == "1") continue;
        require(tok.size() >= 2 && tok[0] == 'f', ErrorKind::InvalidArgument, "bad free-group letter '" + tok + "'");
        const auto caret = tok.find('^');
        int gen = -1, exp = 1;
        try {
            std::size_t used = 0;
            const std::string g = tok.substr(1, caret == std::string::npos ? std::string::npos : caret - 1);
            gen = std::stoi(g, &used);
            require(used == g.size() && gen >= 0, ErrorKind::InvalidArgument, "bad generator index in '" + tok + "'");
            if (caret != std::string::npos) {
                const std::string e = tok.substr(caret + 1);
                exp = std::stoi(e, &used);
                require(used == e.size(), ErrorKind::InvalidArgument, "bad exponent in '" + tok + "'");
            }
        } catch (const std::logic_error&) {
            fail(ErrorKind::InvalidArgument, "bad free-group letter '" + tok + "'");
        }
        for (int k = 0; k < std::abs(exp); ++k) letters.push_back(exp > 0 ? gen + 1 : -(gen + 1));
    }
    return FreeWord(letters);
}

CyclicReduction cyclic_reduce(const FreeWord& w) {
    const auto& l = w.letters();
    std::size_t i = 0, j = l.size();
    while (j - i >= 2 && l[i] == -l[j - 1]) {
        ++i;
        --j;
    }
    return {FreeWord(std::vector<int>(l.begin(), l.begin() + i)),
            FreeWord(std::vector<int>(l.begin() + i, l.begin() + j))};
}

GeodesicWindow::GeodesicWindow(std::vector<int> steps, int offsetOfZero, FreeWord anchor)
    : steps_(std::move(steps)), offset_(offsetOfZero), anchor_(std::move(anchor)) {
    require(offset_ >= 0 && offset_ <= static_cast<int>(steps_.size()), ErrorKind::InvalidArgument,
            "offsetOfZero outside window");
    for (std::size_t i = 0; i < steps_.size(); ++i) {
        require(steps_[i] != 0, ErrorKind::InvalidArgument, "step letter 0");
        if (i > 0)
            require(steps_[i] != -steps_[i - 1], ErrorKind::InvalidArgument,
                    "steps are not reduced (not a geodesic)");
    }
}

int GeodesicWindow::step_at(int i) const {
    require(i >= first() && i < last(), ErrorKind::OutOfWindow,
            "step " + std::to_string(i) + " outside window");
    return steps_[offset_ + i];
}

FreeWord GeodesicWindow::at(int i) const {
    require(i >= first() && i <= last(), ErrorKind::OutOfWindow,
            "position " + std::to_string(i) + " outside window");
    std::vector<int> path;
    if (i >= 0) {
        path.assign(steps_.begin() + offset_, steps_.begin() + offset_ + i);
    } else {
        for (int k = -1; k >= i; --k) path.push_back(-steps_[offset_ + k]);
    }
    return anchor_ * FreeWord(std::move(path));
}

GeodesicWindow shift(const GeodesicWindow& g, int k) {
    const long off = static_cast<long>(g.offset()) + k;
    require(off >= 0 && off <= static_cast<long>(g.steps().size()), ErrorKind::OutOfWindow,
            "shift by " + std::to_string(k) + " leaves the window");
    return GeodesicWindow(g.steps(), static_cast<int>(off), g.at(k));
}

bool same_class(const GeodesicWindow& a, const GeodesicWindow& b) {
    const int lo = std::max(a.first(), b.first()), hi = std::min(a.last(), b.last());
    if (lo > hi) return false;
    for (int i = lo; i < hi; ++i)
        if (a.step_at(i) != b.step_at(i)) return false;
    return true;
}

GeodesicWindow embed_string(const WindowWord& e) {
    std::vector<int> steps;
    steps.reserve(e.letters.size());
    for (char c : e.letters) steps.push_back(letter_value(c) + 1);
    return GeodesicWindow(std::move(steps), e.offsetOfZero, FreeWord());
}

GeodesicWindow Axis::window(int m) const {
    require(m >= 0, ErrorKind::InvalidArgument, "negative window radius");
    const auto& c = core.letters();
    std::vector<int> steps(2 * static_cast<std::size_t>(m));
    for (int i = -m; i < m; ++i) steps[i + m] = c[positive_mod(i, period)];
    return GeodesicWindow(std::move(steps), m, conjugator);
}

Axis axis_of(const FreeWord& g) {
    require(!g.is_identity(), ErrorKind::TrivialElement, "the identity has no axis");
    auto cr = cyclic_reduce(g);
    const int period = cr.core.length();
    return Axis{std::move(cr.conjugator), std::move(cr.core), period};
}

bool is_axis(const GeodesicWindow& gamma, const FreeWord& g) {
    const int len = gamma.last() - gamma.first();
    require(len > 2 * g.length(), ErrorKind::WindowTooShort,
            "window of " + std::to_string(len) + " steps is too short for |g| = " + std::to_string(g.length()));
    if (g.is_identity()) return false;
    std::vector<FreeWord> pts;
    for (int i = gamma.first(); i <= gamma.last(); ++i) pts.push_back(gamma.at(i));
    const int n = static_cast<int>(pts.size());
    for (int k = -g.length(); k <= g.length(); ++k) {
        if (k == 0) continue;
        bool ok = true;
        for (int i = std::max(0, -k); i < std::min(n, n - k) && ok; ++i) ok = (g * pts[i] == pts[i + k]);
        if (ok) return true;
    }
    return false;
}

nlohmann::json to_json(const SubshiftFamily& fam) { return fam.samples; }

SubshiftFamily family_from_json(const nlohmann::json& j) {
    require(j.is_array(), ErrorKind::InvalidArgument, "family must be a JSON array of strings");
    std::string text;
    for (const auto& s : j) {
        require(s.is_string(), ErrorKind::InvalidArgument, "family must be a JSON array of strings");
        text += s.get<std::string>() + "\n";
    }
    return family_from_lines(text);
}

SubshiftFamily family_from_lines(const std::string& text) {
    SubshiftFamily fam;
    std::istringstream is(text);
    std::string line;
    int maxLetter = 1;
    while (std::getline(is, line)) {
        while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.pop_back();
        std::size_t b = 0;
        while (b < line.size() && std::isspace(static_cast<unsigned char>(line[b]))) ++b;
        line = line.substr(b);
        if (line.empty()) continue;
        for (char c : line) {
            require(c >= '0' && c <= '9', ErrorKind::InvalidArgument, "family words use letters 0-9");
            maxLetter = std::max(maxLetter, letter_value(c));
        }
        fam.samples.push_back(line);
    }
    fam.alphabetSize = maxLetter + 1;
    fam.validate();
    return fam;
}

nlohmann::json to_json(const WindowWord& w) {
    return {{"letters", w.letters}, {"offsetOfZero", w.offsetOfZero}};
}

nlohmann::json to_json(const GeodesicWindow& g) {
    std::vector<std::string> steps;
    for (int s : g.steps()) steps.push_back(FreeWord({s}).str());
    return {{"steps", steps}, {"offsetOfZero", g.offset()}, {"anchor", g.anchor().str()}};
}

}  // namespace irslab::symdyn
