#include "sudakov/combinatorics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <set>

namespace sudakov {

// ------------------------------------------------------------------ families

SupportFamily SupportFamily::from_points(const PointSet& T, bool dedup) {
    SupportFamily F;
    F.n = T.dim();
    F.sets = T.supports();
    if (dedup) F.deduplicate();
    return F;
}

void SupportFamily::deduplicate() {
    for (auto& s : sets) {
        std::sort(s.begin(), s.end());
        s.erase(std::unique(s.begin(), s.end()), s.end());
    }
    std::sort(sets.begin(), sets.end());
    sets.erase(std::unique(sets.begin(), sets.end()), sets.end());
}

nlohmann::json SupportFamily::to_json() const { return {{"n", n}, {"family", sets}}; }

SupportFamily SupportFamily::from_json(const nlohmann::json& j, std::size_t n) {
    SupportFamily F;
    const nlohmann::json& list = j.is_array() ? j : j.at("family");
    F.n = j.is_object() && j.contains("n") ? j.at("n").get<std::size_t>() : n;
    for (const auto& s : list) F.sets.push_back(s.get<IndexSet>());
    std::size_t top = 0;
    for (auto& s : F.sets) {
        std::sort(s.begin(), s.end());
        for (int i : s) {
            if (i < 0) throw ModelError("negative index in family");
            top = std::max(top, static_cast<std::size_t>(i) + 1);
        }
    }
    if (F.n == 0) F.n = top;
    if (top > F.n) throw ModelError("family member exceeds the ground set");
    return F;
}

// ------------------------------------------------------------------ VC dimension

void to_json(nlohmann::json& j, const VcResult& r) {
    j = {{"v", r.v}, {"exact", r.exact}, {"shattered", r.shattered}};
}

namespace {

/// Compresses mask bits at the positions of `subset` into a small integer.
std::uint32_t trace(std::uint64_t mask, const IndexSet& subset) {
    std::uint32_t out = 0;
    for (std::size_t b = 0; b < subset.size(); ++b) out |= static_cast<std::uint32_t>((mask >> subset[b]) & 1ULL) << b;
    return out;
}

bool shattered(const std::vector<std::uint64_t>& masks, const IndexSet& subset, std::vector<char>& seen) {
    const std::size_t need = std::size_t{1} << subset.size();
    if (masks.size() < need) return false;
    seen.assign(need, 0);
    std::size_t hit = 0;
    for (auto m : masks) {
        const auto tr = trace(m, subset);
        if (!seen[tr]) {
            seen[tr] = 1;
            if (++hit == need) return true;
        }
    }
    return false;
}

}  // namespace

VcResult vc_dimension(const SupportFamily& F, std::size_t cap, std::uint64_t seed) {
    VcResult res;
    if (F.n > 64) throw DomainError("ground set larger than 64 is not supported");
    std::vector<std::uint64_t> masks;
    for (const auto& s : F.sets) {
        std::uint64_t m = 0;
        for (int i : s) m |= 1ULL << i;
        masks.push_back(m);
    }
    std::sort(masks.begin(), masks.end());
    masks.erase(std::unique(masks.begin(), masks.end()), masks.end());
    if (masks.empty()) return res;
    cap = std::min<std::size_t>(cap, 20);
    std::vector<char> seen;
    if (F.n <= kMaxExactVcGround) {
        // Shattered sets are closed under subsets, so level v only extends level v-1.
        std::vector<IndexSet> level{IndexSet{}};
        for (std::size_t v = 1; v <= cap; ++v) {
            std::vector<IndexSet> next;
            for (const auto& s : level) {
                const int start = s.empty() ? 0 : s.back() + 1;
                for (int e = start; e < static_cast<int>(F.n); ++e) {
                    IndexSet cand = s;
                    cand.push_back(e);
                    if (shattered(masks, cand, seen)) next.push_back(std::move(cand));
                }
            }
            if (next.empty()) break;
            res.v = v;
            res.shattered = next.front();
            level = std::move(next);
        }
        return res;
    }
    // Large ground sets: extend random shattered sets, a lower bound only.
    res.exact = false;
    RandomSource rng(seed);
    IndexSet universe;
    {
        std::set<int> u;
        for (const auto& s : F.sets) u.insert(s.begin(), s.end());
        universe.assign(u.begin(), u.end());
    }
    for (int probe = 0; probe < 2000 && !universe.empty(); ++probe) {
        IndexSet cur;
        for (std::size_t v = 1; v <= cap; ++v) {
            bool grown = false;
            for (int attempt = 0; attempt < 32 && !grown; ++attempt) {
                const int e = universe[rng.index(universe.size())];
                if (std::find(cur.begin(), cur.end(), e) != cur.end()) continue;
                IndexSet cand = cur;
                cand.push_back(e);
                std::sort(cand.begin(), cand.end());
                if (shattered(masks, cand, seen)) {
                    cur = std::move(cand);
                    grown = true;
                }
            }
            if (!grown) break;
        }
        if (cur.size() > res.v) {
            res.v = cur.size();
            res.shattered = cur;
        }
    }
    return res;
}

double sauer_bound(double m, double v) {
    if (v < 0.0 || m < 0.0) throw DomainError("sauer bound needs m, v >= 0");
    if (v == 0.0) return 1.0;
    return std::pow(kE * m / v, v);
}

double sauer_exact_count(std::size_t m, std::size_t v) {
    double total = 0.0;
    double c = 1.0;
    for (std::size_t j = 0; j <= std::min(m, v); ++j) {
        total += c;
        c = c * static_cast<double>(m - j) / static_cast<double>(j + 1);
    }
    return total;
}

// ------------------------------------------------------------------ extraction

void to_json(nlohmann::json& j, const ExtractionResult& r) {
    nlohmann::json pieces = nlohmann::json::array();
    for (std::size_t l = 0; l < r.pieces.size(); ++l) {
        nlohmann::json entries = nlohmann::json::array();
        for (std::size_t i = 0; i < r.pieces[l].size(); ++i)
            if (r.pieces[l][i] != 0.0) entries.push_back({i, r.pieces[l][i]});
        pieces.push_back({{"point", r.selected[l]}, {"entries", entries}, {"norm", r.norms[l]}});
    }
    j = {{"selected", r.selected}, {"pieces", pieces},     {"covered", r.covered},
         {"threshold", r.threshold}, {"disjoint", r.disjoint}, {"certified", r.certified}};
}

ExtractionResult greedy_disjoint_extract(const VectorModel& model, const PointSet& T, double p,
                                         std::optional<double> threshold, const McOptions& mc) {
    if (T.dim() != model.dim()) throw DomainError("family and model dimensions differ");
    ExtractionResult res;
    res.threshold = threshold.value_or(p / 8.0);
    PnormEvaluator eval(model, p, mc);
    PnormEvaluator recheck(model, p, {mc.budget, derive_seed(mc.seed, 1)});
    std::vector<char> inJ(T.dim(), 0);
    std::vector<char> used(T.size(), 0);
    auto residual = [&](std::size_t j, IndexSet& idx, Vector& w) {
        idx.clear();
        w.clear();
        for (int i : T.support(j))
            if (!inJ[static_cast<std::size_t>(i)]) {
                idx.push_back(i);
                w.push_back(T.point(j)[static_cast<std::size_t>(i)]);
            }
    };
    IndexSet idx;
    Vector w;
    for (;;) {
        std::size_t pick = T.size();
        for (std::size_t j = 0; j < T.size() && pick == T.size(); ++j) {
            if (used[j]) continue;
            residual(j, idx, w);
            if (idx.empty()) continue;
            if (eval.sparse(idx, w).lower() >= res.threshold) pick = j;
        }
        if (pick == T.size()) break;
        residual(pick, idx, w);
        used[pick] = 1;
        Vector piece(T.dim(), 0.0);
        for (std::size_t q = 0; q < idx.size(); ++q) piece[static_cast<std::size_t>(idx[q])] = w[q];
        const MomentEstimate cert = recheck.sparse(idx, w);
        res.certified = res.certified && cert.lower() >= res.threshold;
        res.selected.push_back(pick);
        res.pieces.push_back(std::move(piece));
        res.norms.push_back(cert);
        for (int i : T.support(pick)) inJ[static_cast<std::size_t>(i)] = 1;
    }
    for (std::size_t i = 0; i < T.dim(); ++i)
        if (inJ[i]) res.covered.push_back(static_cast<int>(i));
    for (std::size_t a = 0; a < res.pieces.size(); ++a)
        for (std::size_t b = a + 1; b < res.pieces.size(); ++b)
            for (std::size_t i = 0; i < T.dim(); ++i)
                if (res.pieces[a][i] != 0.0 && res.pieces[b][i] != 0.0) res.disjoint = false;
    return res;
}

void to_json(nlohmann::json& j, const ResidualReport& r) {
    nlohmann::json viol = nlohmann::json::array();
    for (const auto& [a, b] : r.violations) viol.push_back({a, b});
    j = {{"separated_pairs", r.separated_pairs},
         {"min_residual", std::isfinite(r.min_residual) ? nlohmann::json(r.min_residual) : nlohmann::json(nullptr)},
         {"violations", viol}};
}

ResidualReport residual_separation_check(const VectorModel& model, const PointSet& T, const IndexSet& J, double p,
                                         const McOptions& mc) {
    ResidualReport rep;
    PnormEvaluator eval(model, p, mc);
    for (std::size_t a = 0; a < T.size(); ++a)
        for (std::size_t b = a + 1; b < T.size(); ++b) {
            Vector d(T.dim());
            for (std::size_t i = 0; i < d.size(); ++i) d[i] = T.point(a)[i] - T.point(b)[i];
            if (eval(d, false).value < p / 2.0) continue;
            ++rep.separated_pairs;
            Vector w;
            for (int i : J) w.push_back(d[static_cast<std::size_t>(i)]);
            const double r = eval.sparse(J, w, false).value;
            rep.min_residual = std::min(rep.min_residual, r);
            if (r < p / 4.0) rep.violations.emplace_back(a, b);
        }
    return rep;
}

// ------------------------------------------------------------------ dbar and distortion

double dbar_distance(const RProfile& prof, const IndexSet& I_t, const IndexSet& I_s) {
    double d = 0.0;
    for (int i : set_symmetric_difference(I_t, I_s)) {
        const double r = prof.r.at(static_cast<std::size_t>(i));
        if (r > 2.0) d += r;
    }
    return d;
}

void to_json(nlohmann::json& j, const DistortionResult& r) {
    j = {{"subset", r.subset},         {"q", r.q},
         {"level", r.level},           {"terminated", r.terminated},
         {"distortion", std::isfinite(r.distortion) ? nlohmann::json(r.distortion) : nlohmann::json(nullptr)},
         {"metric_ok", r.metric_ok},   {"flags", r.flags}};
}

DistortionResult bounded_distortion_subset(const std::vector<IndexSet>& supports, const RProfile& prof,
                                           std::size_t f_target, double C, double p) {
    if (f_target < 2) throw DomainError("target cardinality must be at least 2");
    if (!(C > 1.0)) throw DomainError("distortion constant must exceed 1");
    const std::size_t N = supports.size();
    std::vector<std::vector<double>> d(N, std::vector<double>(N, 0.0));
    for (std::size_t a = 0; a < N; ++a)
        for (std::size_t b = a + 1; b < N; ++b) d[a][b] = d[b][a] = dbar_distance(prof, supports[a], supports[b]);
    DistortionResult res;
    // Triangle inequality on every triple (small families) or a fixed sample.
    {
        RandomSource rng(0x7A1A);
        const bool all = N <= 60;
        const std::size_t count = all ? N * N * N : 20000;
        for (std::size_t q = 0; q < count && res.metric_ok; ++q) {
            const std::size_t a = all ? q / (N * N) : rng.index(N);
            const std::size_t b = all ? (q / N) % N : rng.index(N);
            const std::size_t c = all ? q % N : rng.index(N);
            if (d[a][c] > d[a][b] + d[b][c] + 1e-9) res.metric_ok = false;
        }
        if (!res.metric_ok) res.flags.push_back("triangle_inequality_failed");
    }
    auto distortion = [&](const std::vector<std::size_t>& s) {
        double lo = kInf, hi = 0.0;
        for (std::size_t a = 0; a < s.size(); ++a)
            for (std::size_t b = a + 1; b < s.size(); ++b) {
                lo = std::min(lo, d[s[a]][s[b]]);
                hi = std::max(hi, d[s[a]][s[b]]);
            }
        return lo > 0.0 ? hi / lo : kInf;
    };
    auto pack = [&](const std::vector<std::size_t>& U, double sep) {
        std::vector<std::size_t> P;
        if (U.empty()) return P;
        std::size_t a0 = U[0], b0 = U[0];
        double diam = -1.0;
        for (std::size_t x = 0; x < U.size(); ++x)
            for (std::size_t y = x + 1; y < U.size(); ++y)
                if (d[U[x]][U[y]] > diam) {
                    diam = d[U[x]][U[y]];
                    a0 = U[x];
                    b0 = U[y];
                }
        P.push_back(a0);
        if (U.size() < 2 || diam < sep || diam <= 0.0) return P;
        P.push_back(b0);
        for (;;) {
            std::size_t arg = N;
            double far = -1.0;
            for (auto x : U) {
                double m = kInf;
                for (auto y : P) m = std::min(m, d[x][y]);
                if (m >= sep && m > 0.0 && m > far) {
                    far = m;
                    arg = x;
                }
            }
            if (arg == N) break;
            P.push_back(arg);
        }
        return P;
    };

    std::vector<std::size_t> U(N);
    std::iota(U.begin(), U.end(), 0);
    const auto max_depth = static_cast<std::size_t>(std::ceil(std::log(1.0 + p)));
    std::vector<std::size_t> best;
    double best_q = 0.0;
    std::size_t best_level = 0;
    for (std::size_t level = 0;; ++level) {
        double M = 0.0;
        for (auto a : U)
            for (auto b : U) M = std::max(M, d[a][b]);
        if (M <= 0.0 || U.size() < 2) {
            res.terminated = N < f_target ? "too_small" : "exhausted";
            break;
        }
        const std::vector<std::size_t> P = pack(U, M / C);
        if (P.size() > best.size()) {
            best = P;
            best_q = M;
            best_level = level;
        }
        if (P.size() >= f_target) {
            res.terminated = "found";
            break;
        }
        if (level >= max_depth) {
            res.terminated = N < f_target ? "too_small" : "exhausted";
            break;
        }
        // A maximal M/C-packing is an M/C-cover: recurse into the largest cell.
        std::vector<std::vector<std::size_t>> cells(P.size());
        for (auto x : U) {
            std::size_t arg = 0;
            for (std::size_t c = 1; c < P.size(); ++c)
                if (d[x][P[c]] < d[x][P[arg]]) arg = c;
            cells[arg].push_back(x);
        }
        std::size_t largest = 0;
        for (std::size_t c = 1; c < cells.size(); ++c)
            if (cells[c].size() > cells[largest].size()) largest = c;
        U = cells[largest];
    }
    res.subset = best;
    std::sort(res.subset.begin(), res.subset.end());
    res.q = best_q;
    res.level = best_level;
    res.distortion = res.subset.size() >= 2 ? distortion(res.subset) : 0.0;
    if (res.terminated != "found") res.flags.push_back("best_effort");
    return res;
}

}  // namespace sudakov
