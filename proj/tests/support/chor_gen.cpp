#include "chor_gen.hpp"

#include <algorithm>
#include <vector>

namespace chortest {

namespace {

using Comps = std::vector<int>;

class Gen {
public:
    Gen(std::mt19937_64& rng, const GenOptions& opts) : rng_(rng), opts_(opts) {}

    std::string chor(const Comps& cs, int depth) {
        if (cs.size() < 2) return solo(cs.front(), depth);
        if (depth <= 0) return comm(cs);
        switch (pick(6)) {
        case 0: return comm(cs);
        case 1:
        case 2: return "(" + chor(cs, depth - 1) + " ; " + chor(cs, depth - 1) + ")";
        case 3: return choice(cs, depth);
        case 4: return opts_.allow_loops ? loop(cs, depth) : comm(cs);
        default: return par(cs, depth);
        }
    }

private:
    std::mt19937_64& rng_;
    const GenOptions& opts_;

    std::size_t pick(std::size_t n) { return rng_() % n; }
    bool coin() { return pick(2) == 0; }
    static std::string name(int c) { return "P" + std::to_string(c); }

    std::string comm(const Comps& cs) {
        int sender = cs[pick(cs.size())];
        Comps others;
        for (int c : cs)
            if (c != sender) others.push_back(c);
        std::shuffle(others.begin(), others.end(), rng_);
        std::size_t n = 1 + pick(others.size());
        others.resize(n);
        std::sort(others.begin(), others.end());
        bool async = opts_.allow_async && coin();
        std::string out = name(sender) + (async ? ".a" : ".s") + "[true, " + (coin() ? "x := x * 2" : "skip") + "] -> { ";
        for (std::size_t k = 0; k < others.size(); ++k) {
            out += (k ? ", " : "") + name(others[k]) + ".r[";
            out += coin() ? "x := x + " + std::to_string(1 + pick(3)) : "skip";
            out += "]";
        }
        return out + " }";
    }

    // Only one component available: a local choice.
    std::string solo(int c, int depth) {
        (void)depth;
        return "choice " + name(c) + " { e[true, x := x + 1] => nil }";
    }

    std::string choice(const Comps& cs, int depth) {
        int m = cs[pick(cs.size())];
        int bound = static_cast<int>(pick(6));
        return "choice " + name(m) + " { e[x > " + std::to_string(bound) + ", x := x + 1] => " + chor(cs, depth - 1) +
               " | o[x <= " + std::to_string(bound) + ", skip] => " + (coin() ? chor(cs, depth - 1) : "nil") + " }";
    }

    std::string loop(const Comps& cs, int depth) {
        int m = cs[pick(cs.size())];
        return "while (" + name(m) + ".c[i < 2, i := i + 1]) { " + chor(cs, depth - 1) + " }";
    }

    std::string par(const Comps& cs, int depth) {
        Comps shuffled = cs;
        std::shuffle(shuffled.begin(), shuffled.end(), rng_);
        std::size_t cut = 1 + pick(shuffled.size() - 1);
        Comps l(shuffled.begin(), shuffled.begin() + static_cast<std::ptrdiff_t>(cut));
        Comps r(shuffled.begin() + static_cast<std::ptrdiff_t>(cut), shuffled.end());
        std::sort(l.begin(), l.end());
        std::sort(r.begin(), r.end());
        return "(" + chor(l, depth - 1) + " || " + chor(r, depth - 1) + ")";
    }
};

} // namespace

std::string gen_declaration() {
    std::string out;
    for (int k = 0; k < 4; ++k) {
        out += "comp P" + std::to_string(k) + " {\n";
        out += "  var x: int = " + std::to_string(k + 1) + ";\n";
        out += "  var i: int = 0;\n";
        out += "  port s: ss of int binds x;\n";
        out += "  port a: as of int binds x;\n";
        out += "  port r: r of int binds x;\n";
        out += "  port c: ss of int binds i;\n";
        out += "  port e: ss of int binds x;\n";
        out += "  port o: ss of int binds x;\n";
        out += "}\n";
    }
    return out;
}

std::string gen_choreography(std::mt19937_64& rng, const GenOptions& opts) {
    Comps all = {0, 1, 2, 3};
    // a random subset of at least two participants
    std::shuffle(all.begin(), all.end(), rng);
    all.resize(2 + rng() % 3);
    std::sort(all.begin(), all.end());
    return Gen(rng, opts).chor(all, opts.depth);
}

std::string gen_program(std::mt19937_64& rng, const GenOptions& opts) {
    return gen_declaration() + "choreography g = " + gen_choreography(rng, opts) + "\n";
}

} // namespace chortest
