#include "ccs/treecode.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace ccs {

int ParityProfile::B() const {
    return std::accumulate(m.begin(), m.end(), 0);
}

ParityProfile ParityProfile::from_parity(int B, int n, int J, const std::vector<int>& parity) {
    if (n < 1 || J < 1) throw std::invalid_argument("profile: n and J must be positive");
    if (static_cast<int>(parity.size()) != n - 1)
        throw std::invalid_argument("profile: parity allocation needs n-1 entries");
    ParityProfile p;
    p.n = n;
    p.J = J;
    p.m.resize(n);
    p.l.resize(n);
    p.m[0] = J;
    p.l[0] = 0;
    for (int j = 1; j < n; ++j) {
        p.l[j] = parity[j - 1];
        p.m[j] = J - p.l[j];
    }
    p.validate();
    if (p.B() != B) throw std::invalid_argument("profile: allocation inconsistent with B");
    return p;
}

void ParityProfile::validate() const {
    if (n < 1 || J < 1) throw std::invalid_argument("profile: n and J must be positive");
    if (static_cast<int>(m.size()) != n || static_cast<int>(l.size()) != n)
        throw std::invalid_argument("profile: m and l must have n entries");
    if (m[0] != J || l[0] != 0)
        throw std::invalid_argument("profile: fragment 0 must be all information bits");
    for (int j = 0; j < n; ++j) {
        if (m[j] < 0 || l[j] < 0 || m[j] + l[j] != J)
            throw std::invalid_argument("profile: need m[j], l[j] >= 0 and m[j]+l[j] = J");
    }
}

TreeCodebook TreeCodebook::sample(const ParityProfile& profile, Rng& rng) {
    profile.validate();
    TreeCodebook cb;
    cb.profile = profile;
    for (int j = 1; j < profile.n; ++j)
        for (int l = 0; l < j; ++l)
            cb.gen[{l, j}] = sample_uniform_matrix(profile.m[l], profile.l[j], rng);
    return cb;
}

std::vector<BitVector> encode(const BitVector& w, const TreeCodebook& cb) {
    const ParityProfile& p = cb.profile;
    if (static_cast<int>(w.size()) != p.B())
        throw std::invalid_argument("encode: message length must equal B");
    std::vector<BitVector> info(p.n);
    std::size_t off = 0;
    for (int j = 0; j < p.n; ++j) {
        info[j] = w.slice(off, p.m[j]);
        off += p.m[j];
    }
    std::vector<BitVector> frags(p.n);
    for (int j = 0; j < p.n; ++j) {
        frags[j] = info[j];
        BitVector parity(p.l[j]);
        for (int l = 0; l < j; ++l)
            parity.xor_assign(matvec_mod2(info[l], cb.at(l, j)));
        frags[j].append(parity);
    }
    return frags;
}

bool check_parity_stage(const std::vector<BitVector>& path, const TreeCodebook& cb, int j) {
    const ParityProfile& p = cb.profile;
    if (j < 1 || j >= p.n || static_cast<int>(path.size()) <= j)
        throw std::invalid_argument("check_parity_stage: stage out of range");
    BitVector expect(p.l[j]);
    for (int l = 0; l < j; ++l)
        expect.xor_assign(matvec_mod2(path[l].slice(0, p.m[l]), cb.at(l, j)));
    return path[j].slice(p.m[j], p.l[j]) == expect;
}

std::uint32_t fragment_to_index(const BitVector& frag) {
    const std::size_t J = frag.size();
    if (J > 31) throw std::invalid_argument("fragment_to_index: fragment too long");
    std::uint32_t idx = 0;
    for (std::size_t b = 0; b < J; ++b)
        if (frag.get(b)) idx |= 1u << (J - 1 - b);
    return idx;
}

BitVector index_to_fragment(std::uint32_t index, int J) {
    BitVector f(J);
    for (int b = 0; b < J; ++b)
        if ((index >> (J - 1 - b)) & 1u) f.set(b, true);
    return f;
}

void DecodeStats::merge(const DecodeStats& o) {
    if (survivors.size() < o.survivors.size()) survivors.resize(o.survivors.size(), 0);
    for (std::size_t i = 0; i < o.survivors.size(); ++i) survivors[i] += o.survivors[i];
    parity_checks += o.parity_checks;
    nodes_visited += o.nodes_visited;
    roots += o.roots;
    decoded += o.decoded;
    ambiguous += o.ambiguous;
}

namespace {

struct Path {
    BitVector info;                    // concatenated info bits so far
    std::vector<BitVector> parity;     // predicted parity for stages j+1..n-1
};

bool parity_matches(const BitVector& frag, int m, const BitVector& want) {
    for (std::size_t i = 0; i < want.size(); ++i)
        if (frag.get(m + i) != want.get(i)) return false;
    return true;
}

}  // namespace

RootDecodeResult tree_decode_root(const std::vector<std::vector<BitVector>>& lists,
                                  const TreeCodebook& cb, std::size_t root,
                                  DecodeStats* stats) {
    const ParityProfile& p = cb.profile;
    if (static_cast<int>(lists.size()) != p.n)
        throw std::invalid_argument("tree_decode: need one fragment list per slot");
    if (root >= lists[0].size())
        throw std::invalid_argument("tree_decode: root index out of range");

    RootDecodeResult res;
    res.survivors.assign(p.n, 0);
    res.survivors[0] = 1;

    DecodeStats local;
    local.survivors.assign(p.n, 0);
    local.survivors[0] = 1;
    local.roots = 1;

    auto extend = [&](const Path& base, const BitVector& frag, int j) {
        Path next;
        next.info = base.info;
        next.info.append(frag.slice(0, p.m[j]));
        next.parity.assign(p.n, BitVector());
        const BitVector info_j = frag.slice(0, p.m[j]);
        for (int t = j + 1; t < p.n; ++t) {
            next.parity[t] = base.parity[t];
            next.parity[t].xor_assign(matvec_mod2(info_j, cb.at(j, t)));
        }
        return next;
    };

    std::vector<Path> frontier;
    {
        Path start;
        start.info = lists[0][root];
        start.parity.assign(p.n, BitVector());
        const BitVector& frag0 = lists[0][root];
        for (int t = 1; t < p.n; ++t)
            start.parity[t] = matvec_mod2(frag0, cb.at(0, t));
        frontier.push_back(std::move(start));
    }

    for (int j = 1; j < p.n; ++j) {
        std::vector<Path> next;
        for (const Path& path : frontier) {
            for (const BitVector& frag : lists[j]) {
                local.nodes_visited += 1;
                local.parity_checks += p.l[j];
                if (parity_matches(frag, p.m[j], path.parity[j]))
                    next.push_back(extend(path, frag, j));
            }
        }
        frontier = std::move(next);
        res.survivors[j] = static_cast<long long>(frontier.size());
        local.survivors[j] = res.survivors[j];
        if (frontier.empty()) break;
    }

    if (frontier.size() == 1) {
        res.message = frontier[0].info;
        local.decoded = 1;
    } else if (frontier.size() > 1) {
        local.ambiguous = 1;
    }
    if (stats) stats->merge(local);
    return res;
}

std::vector<BitVector> tree_decode(const std::vector<std::vector<BitVector>>& lists,
                                   const TreeCodebook& cb, DecodeStats* stats) {
    std::vector<BitVector> out;
    for (std::size_t r = 0; r < lists[0].size(); ++r) {
        RootDecodeResult res = tree_decode_root(lists, cb, r, stats);
        if (res.message) out.push_back(*res.message);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace ccs
