#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sudakov/common.hpp"

namespace sudakov {

/// Which simplified form the points of a lattice family are in.
/// A: t_i in {0, k_i}.  B: t_i in ((k_i - 2 rho)_+, k_i] or 0.
enum class LatticeForm { none, A, B };

struct LatticeSpec {
    Vector k;  // magnitudes, k_i >= rho on the coordinates in use
    double rho = 0.0;
    double delta = 0.0;
    LatticeForm form = LatticeForm::none;
};

/// Sparse view of one point: its support and the values there.
struct SparsePoint {
    IndexSet index;
    Vector value;
};

/// Finite family T in R^n with cached supports.
class PointSet {
public:
    PointSet() = default;
    PointSet(std::size_t n, double p, std::vector<Vector> points = {}, std::optional<LatticeSpec> lattice = {});

    std::size_t dim() const { return n_; }
    std::size_t size() const { return points_.size(); }
    bool empty() const { return points_.empty(); }
    double p() const { return p_; }
    void set_p(double p) { p_ = p; }

    const Vector& point(std::size_t j) const { return points_.at(j); }
    const std::vector<Vector>& points() const { return points_; }
    const IndexSet& support(std::size_t j) const { return supports_.at(j); }
    const std::vector<IndexSet>& supports() const { return supports_; }
    SparsePoint sparse(std::size_t j) const;

    const std::optional<LatticeSpec>& lattice() const { return lattice_; }
    void set_lattice(std::optional<LatticeSpec> lattice) { lattice_ = std::move(lattice); }

    void add(Vector t);
    /// Index of the zero vector, if present.
    std::optional<std::size_t> origin() const;
    /// Family {t - s : t in T}.
    PointSet translated(const Vector& s) const;
    PointSet subset(const std::vector<std::size_t>& which) const;

    nlohmann::json to_json() const;
    static PointSet from_json(const nlohmann::json& j);
    /// One row per (point, coordinate) of the support: point,index,value,k.
    std::string to_csv() const;

private:
    std::size_t n_ = 0;
    double p_ = 1.0;
    std::vector<Vector> points_;
    std::vector<IndexSet> supports_;
    std::optional<LatticeSpec> lattice_;
};

/// Sorted symmetric difference / difference / intersection of sorted index sets.
IndexSet set_symmetric_difference(const IndexSet& a, const IndexSet& b);
IndexSet set_difference(const IndexSet& a, const IndexSet& b);
IndexSet set_intersection(const IndexSet& a, const IndexSet& b);

}  // namespace sudakov
