#include "sudakov/point_set.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <sstream>

namespace sudakov {

namespace {

const char* form_name(LatticeForm f) {
    switch (f) {
        case LatticeForm::A: return "A";
        case LatticeForm::B: return "B";
        default: return "none";
    }
}

LatticeForm form_from(const std::string& s) {
    if (s == "A") return LatticeForm::A;
    if (s == "B") return LatticeForm::B;
    if (s == "none") return LatticeForm::none;
    throw ModelError("unknown lattice form: " + s);
}

}  // namespace

PointSet::PointSet(std::size_t n, double p, std::vector<Vector> points, std::optional<LatticeSpec> lattice)
    : n_(n), p_(p), lattice_(std::move(lattice)) {
    if (lattice_ && lattice_->k.size() != n) throw ModelError("lattice magnitudes have wrong dimension");
    for (auto& t : points) add(std::move(t));
}

void PointSet::add(Vector t) {
    if (t.size() != n_) throw DomainError("point has wrong dimension");
    for (double v : t)
        if (!std::isfinite(v)) throw DomainError("point coordinates must be finite");
    supports_.push_back(support_of(t));
    points_.push_back(std::move(t));
}

SparsePoint PointSet::sparse(std::size_t j) const {
    SparsePoint sp;
    sp.index = supports_.at(j);
    for (int i : sp.index) sp.value.push_back(points_[j][static_cast<std::size_t>(i)]);
    return sp;
}

std::optional<std::size_t> PointSet::origin() const {
    for (std::size_t j = 0; j < points_.size(); ++j)
        if (supports_[j].empty()) return j;
    return std::nullopt;
}

PointSet PointSet::translated(const Vector& s) const {
    if (s.size() != n_) throw DomainError("translation has wrong dimension");
    PointSet out(n_, p_);
    for (const auto& t : points_) {
        Vector d(n_);
        for (std::size_t i = 0; i < n_; ++i) d[i] = t[i] - s[i];
        out.add(std::move(d));
    }
    return out;
}

PointSet PointSet::subset(const std::vector<std::size_t>& which) const {
    PointSet out(n_, p_, {}, lattice_);
    for (auto j : which) out.add(points_.at(j));
    return out;
}

nlohmann::json PointSet::to_json() const {
    nlohmann::json pts = nlohmann::json::array();
    for (std::size_t j = 0; j < points_.size(); ++j) {
        nlohmann::json entries = nlohmann::json::array();
        for (int i : supports_[j]) entries.push_back({i, points_[j][static_cast<std::size_t>(i)]});
        pts.push_back(entries);
    }
    nlohmann::json out = {{"n", n_}, {"p", p_}, {"points", pts}};
    if (lattice_)
        out["lattice"] = {{"k", lattice_->k},
                          {"rho", lattice_->rho},
                          {"delta", lattice_->delta},
                          {"form", form_name(lattice_->form)}};
    return out;
}

PointSet PointSet::from_json(const nlohmann::json& j) {
    const auto n = j.at("n").get<std::size_t>();
    std::optional<LatticeSpec> lattice;
    if (j.contains("lattice") && !j.at("lattice").is_null()) {
        const auto& l = j.at("lattice");
        LatticeSpec spec;
        spec.k = l.at("k").get<Vector>();
        spec.rho = l.value("rho", 0.0);
        spec.delta = l.value("delta", 0.0);
        spec.form = form_from(l.value("form", std::string("none")));
        lattice = std::move(spec);
    }
    PointSet out(n, j.value("p", 1.0), {}, std::move(lattice));
    for (const auto& entries : j.at("points")) {
        Vector t(n, 0.0);
        for (const auto& e : entries) {
            const auto i = e.at(0).get<std::size_t>();
            if (i >= n) throw ModelError("point index out of range");
            t[i] = e.at(1).get<double>();
        }
        out.add(std::move(t));
    }
    return out;
}

std::string PointSet::to_csv() const {
    std::ostringstream os;
    os.precision(17);
    os << "point,index,value,k\n";
    for (std::size_t j = 0; j < points_.size(); ++j)
        for (int i : supports_[j]) {
            os << j << ',' << i << ',' << points_[j][static_cast<std::size_t>(i)] << ',';
            if (lattice_) os << lattice_->k[static_cast<std::size_t>(i)];
            os << '\n';
        }
    return os.str();
}

IndexSet set_symmetric_difference(const IndexSet& a, const IndexSet& b) {
    IndexSet out;
    std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

IndexSet set_difference(const IndexSet& a, const IndexSet& b) {
    IndexSet out;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

IndexSet set_intersection(const IndexSet& a, const IndexSet& b) {
    IndexSet out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

}  // namespace sudakov
