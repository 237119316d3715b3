#include "snd/code.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <queue>
#include <sstream>
#include <stdexcept>

#include "snd/random.hpp"

namespace snd::code {

namespace {

std::uint64_t fnv1a(std::uint64_t h, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
        h ^= (v >> (8 * i)) & 0xffu;
        h *= 0x100000001b3ull;
    }
    return h;
}

}  // namespace

CodeSpec make_code_from_checks(int n, std::vector<std::vector<int>> checks) {
    if (n <= 0) throw std::invalid_argument("code length must be positive");
    for (auto& chk : checks) {
        std::sort(chk.begin(), chk.end());
        chk.erase(std::unique(chk.begin(), chk.end()), chk.end());
        for (int p : chk)
            if (p < 0 || p >= n) throw std::invalid_argument("check position out of range");
    }

    CodeSpec spec;
    spec.n = n;
    spec.checks = std::move(checks);

    // reduce H over GF(2) to find pivots and the encoding rules
    const std::size_t words = (static_cast<std::size_t>(n) + 63) / 64;
    std::vector<std::vector<std::uint64_t>> rows;
    rows.reserve(spec.checks.size());
    for (const auto& chk : spec.checks) {
        std::vector<std::uint64_t> row(words, 0);
        for (int p : chk) row[static_cast<std::size_t>(p) >> 6] |= 1ull << (p & 63);
        rows.push_back(std::move(row));
    }
    std::vector<int> pivot_cols;
    std::size_t rank = 0;
    for (int c = 0; c < n && rank < rows.size(); ++c) {
        const std::size_t w = static_cast<std::size_t>(c) >> 6;
        const std::uint64_t bit = 1ull << (c & 63);
        std::size_t piv = rank;
        while (piv < rows.size() && !(rows[piv][w] & bit)) ++piv;
        if (piv == rows.size()) continue;
        std::swap(rows[piv], rows[rank]);
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (r != rank && (rows[r][w] & bit))
                for (std::size_t j = 0; j < words; ++j) rows[r][j] ^= rows[rank][j];
        }
        pivot_cols.push_back(c);
        ++rank;
    }

    spec.k = n - static_cast<int>(rank);
    if (spec.k <= 0) throw std::invalid_argument("parity matrix leaves no message bits");

    std::vector<std::uint8_t> is_pivot(static_cast<std::size_t>(n), 0);
    for (int c : pivot_cols) is_pivot[static_cast<std::size_t>(c)] = 1;
    for (int c = 0; c < n; ++c)
        if (!is_pivot[static_cast<std::size_t>(c)]) spec.info_positions.push_back(c);

    for (std::size_t r = 0; r < rank; ++r) {
        std::vector<int> sources;
        int pivot = -1;
        for (int c = 0; c < n; ++c) {
            if (rows[r][static_cast<std::size_t>(c) >> 6] & (1ull << (c & 63))) {
                if (pivot < 0)
                    pivot = c;
                else
                    sources.push_back(c);
            }
        }
        spec.parity_rules.emplace_back(pivot, std::move(sources));
    }

    // flat adjacency for the decoders
    spec.chk_start.assign(spec.checks.size() + 1, 0);
    for (std::size_t c = 0; c < spec.checks.size(); ++c) {
        spec.chk_start[c + 1] = spec.chk_start[c] + static_cast<int>(spec.checks[c].size());
        spec.max_check_degree = std::max(spec.max_check_degree, static_cast<int>(spec.checks[c].size()));
    }
    spec.chk_var.reserve(static_cast<std::size_t>(spec.chk_start.back()));
    for (const auto& chk : spec.checks)
        for (int p : chk) spec.chk_var.push_back(p);

    spec.var_start.assign(static_cast<std::size_t>(n) + 1, 0);
    for (int v : spec.chk_var) ++spec.var_start[static_cast<std::size_t>(v) + 1];
    for (int c = 0; c < n; ++c)
        spec.var_start[static_cast<std::size_t>(c) + 1] += spec.var_start[static_cast<std::size_t>(c)];
    spec.var_edge.assign(spec.chk_var.size(), 0);
    std::vector<int> fill(spec.var_start.begin(), spec.var_start.end() - 1);
    for (std::size_t e = 0; e < spec.chk_var.size(); ++e)
        spec.var_edge[static_cast<std::size_t>(fill[static_cast<std::size_t>(spec.chk_var[e])]++)] =
            static_cast<int>(e);

    std::uint64_t h = 0xcbf29ce484222325ull;
    h = fnv1a(h, static_cast<std::uint64_t>(spec.n));
    h = fnv1a(h, static_cast<std::uint64_t>(spec.k));
    for (const auto& chk : spec.checks) {
        h = fnv1a(h, chk.size());
        for (int p : chk) h = fnv1a(h, static_cast<std::uint64_t>(p));
    }
    spec.fingerprint = h;
    return spec;
}

CodeSpec load_alist(const std::string& text) {
    std::istringstream in(text);
    std::vector<long> tok;
    long v;
    while (in >> v) tok.push_back(v);
    std::size_t pos = 0;
    auto next = [&]() -> long {
        if (pos >= tok.size()) throw std::runtime_error("alist: unexpected end of input");
        return tok[pos++];
    };

    const long n = next();
    const long m = next();
    if (n <= 0 || m <= 0) throw std::runtime_error("alist: bad dimensions");
    const long mcd = next();
    const long mrd = next();
    std::vector<long> col_deg(static_cast<std::size_t>(n));
    std::vector<long> row_deg(static_cast<std::size_t>(m));
    long edges_c = 0, edges_r = 0;
    for (auto& d : col_deg) {
        d = next();
        if (d < 0 || d > mcd) throw std::runtime_error("alist: column degree out of range");
        edges_c += d;
    }
    for (auto& d : row_deg) {
        d = next();
        if (d < 0 || d > mrd) throw std::runtime_error("alist: row degree out of range");
        edges_r += d;
    }
    if (edges_c != edges_r) throw std::runtime_error("alist: degree sums disagree");

    const std::size_t remaining = tok.size() - pos;
    const std::size_t padded = static_cast<std::size_t>(n * mcd + m * mrd);
    const std::size_t packed = static_cast<std::size_t>(edges_c + edges_r);
    bool is_padded;
    if (remaining == padded)
        is_padded = true;
    else if (remaining == packed)
        is_padded = false;
    else
        throw std::runtime_error("alist: index list length mismatch");

    // column lists (validated, then discarded in favor of the row lists)
    for (long c = 0; c < n; ++c) {
        const long take = is_padded ? mcd : col_deg[static_cast<std::size_t>(c)];
        for (long j = 0; j < take; ++j) {
            const long idx = next();
            if (idx < 0 || idx > m) throw std::runtime_error("alist: row index out of range");
            if (!is_padded && idx == 0) throw std::runtime_error("alist: zero index in packed list");
        }
    }
    std::vector<std::vector<int>> checks(static_cast<std::size_t>(m));
    for (long r = 0; r < m; ++r) {
        const long take = is_padded ? mrd : row_deg[static_cast<std::size_t>(r)];
        long seen = 0;
        for (long j = 0; j < take; ++j) {
            const long idx = next();
            if (idx < 0 || idx > n) throw std::runtime_error("alist: column index out of range");
            if (idx == 0) {
                if (!is_padded) throw std::runtime_error("alist: zero index in packed list");
                continue;
            }
            checks[static_cast<std::size_t>(r)].push_back(static_cast<int>(idx - 1));
            ++seen;
        }
        if (seen != row_deg[static_cast<std::size_t>(r)])
            throw std::runtime_error("alist: row list does not match its degree");
    }
    return make_code_from_checks(static_cast<int>(n), std::move(checks));
}

CodeSpec load_alist_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open alist file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return load_alist(ss.str());
}

namespace {

// Progressive edge growth on the protograph: connect each variable to the
// most distant (ideally unreachable) check, breaking ties by degree then index.
std::vector<std::pair<int, int>> peg_edges(int num_checks, int num_vars, int var_degree) {
    std::vector<std::vector<int>> var_adj(static_cast<std::size_t>(num_vars));
    std::vector<std::vector<int>> chk_adj(static_cast<std::size_t>(num_checks));
    std::vector<std::pair<int, int>> edges;  // (check, var)

    for (int v = 0; v < num_vars; ++v) {
        for (int e = 0; e < var_degree; ++e) {
            std::vector<int> dist(static_cast<std::size_t>(num_checks), -1);
            if (e > 0) {
                // BFS from v over the bipartite graph built so far
                std::vector<int> vdist(static_cast<std::size_t>(num_vars), -1);
                vdist[static_cast<std::size_t>(v)] = 0;
                std::queue<int> frontier;
                frontier.push(v);
                while (!frontier.empty()) {
                    const int cur = frontier.front();
                    frontier.pop();
                    for (int c : var_adj[static_cast<std::size_t>(cur)]) {
                        if (dist[static_cast<std::size_t>(c)] >= 0) continue;
                        dist[static_cast<std::size_t>(c)] = vdist[static_cast<std::size_t>(cur)] + 1;
                        for (int v2 : chk_adj[static_cast<std::size_t>(c)]) {
                            if (vdist[static_cast<std::size_t>(v2)] >= 0) continue;
                            vdist[static_cast<std::size_t>(v2)] = dist[static_cast<std::size_t>(c)] + 1;
                            frontier.push(v2);
                        }
                    }
                }
            }
            int best = -1;
            bool best_unreachable = false;
            int best_dist = -1;
            for (int c = 0; c < num_checks; ++c) {
                const bool connected =
                    std::find(var_adj[static_cast<std::size_t>(v)].begin(),
                              var_adj[static_cast<std::size_t>(v)].end(), c) !=
                    var_adj[static_cast<std::size_t>(v)].end();
                if (connected) continue;
                const bool unreachable = dist[static_cast<std::size_t>(c)] < 0;
                const int d = dist[static_cast<std::size_t>(c)];
                bool better;
                if (best < 0)
                    better = true;
                else if (unreachable != best_unreachable)
                    better = unreachable;
                else if (!unreachable && d != best_dist)
                    better = d > best_dist;
                else
                    better = chk_adj[static_cast<std::size_t>(c)].size() <
                             chk_adj[static_cast<std::size_t>(best)].size();
                if (better) {
                    best = c;
                    best_unreachable = unreachable;
                    best_dist = d;
                }
            }
            var_adj[static_cast<std::size_t>(v)].push_back(best);
            chk_adj[static_cast<std::size_t>(best)].push_back(v);
            edges.emplace_back(best, v);
        }
    }
    return edges;
}

}  // namespace

CodeSpec make_default_code(int n, std::uint64_t seed) {
    constexpr int kBaseCols = 24;
    constexpr int kBaseRows = 12;
    constexpr int kVarDegree = 3;
    if (n <= 0 || n % kBaseCols != 0)
        throw std::invalid_argument("default code length must be a positive multiple of 24");
    const int z = n / kBaseCols;

    const auto base = peg_edges(kBaseRows, kBaseCols, kVarDegree);
    Rng rng(derive_seed(seed, {0x51c0de}));
    std::vector<std::vector<int>> checks(static_cast<std::size_t>(kBaseRows * z));
    for (const auto& [r, c] : base) {
        const int shift = z > 1 ? rng.uniform_int(0, z - 1) : 0;
        for (int t = 0; t < z; ++t)
            checks[static_cast<std::size_t>(r * z + t)].push_back(c * z + (t + shift) % z);
    }
    return make_code_from_checks(n, std::move(checks));
}

Codeword encode(const Message& u, const CodeSpec& spec) {
    if (static_cast<int>(u.size()) != spec.k) throw std::invalid_argument("message length mismatch");
    Codeword c(static_cast<std::size_t>(spec.n), 0);
    for (int j = 0; j < spec.k; ++j) c[static_cast<std::size_t>(spec.info_positions[j])] = u[j] & 1u;
    for (const auto& [pivot, sources] : spec.parity_rules) {
        std::uint8_t acc = 0;
        for (int s : sources) acc ^= c[static_cast<std::size_t>(s)];
        c[static_cast<std::size_t>(pivot)] = acc;
    }
    return c;
}

bool satisfies_checks(const Codeword& c, const CodeSpec& spec) {
    if (static_cast<int>(c.size()) != spec.n) return false;
    for (const auto& chk : spec.checks) {
        std::uint8_t acc = 0;
        for (int p : chk) acc ^= c[static_cast<std::size_t>(p)];
        if (acc) return false;
    }
    return true;
}

Message extract_message(const Codeword& c, const CodeSpec& spec) {
    Message u(static_cast<std::size_t>(spec.k));
    for (int j = 0; j < spec.k; ++j) u[j] = c[static_cast<std::size_t>(spec.info_positions[j])] & 1u;
    return u;
}

Message xor_messages(std::span<const Message> msgs) {
    if (msgs.empty()) throw std::invalid_argument("xor_messages needs at least one message");
    Message out = msgs.front();
    for (std::size_t i = 1; i < msgs.size(); ++i) {
        if (msgs[i].size() != out.size()) throw std::invalid_argument("message length mismatch");
        for (std::size_t j = 0; j < out.size(); ++j) out[j] ^= msgs[i][j];
    }
    return out;
}

}  // namespace snd::code
