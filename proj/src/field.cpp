#include "dyadlab/field.hpp"

#include <json.hpp>

#include <cmath>

namespace dyad {

Eigen::VectorXd Field1::sum(Iv q) const {
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(dim());
    int span = grid->leaf_span(q.gen);
    for (int n = 0; n < span; ++n) acc += v.col(grid->leaf_at(q, n));
    return acc * leaf_measure();
}

Eigen::VectorXd Field1::average(Iv q) const { return sum(q) / grid->measure(q); }

double Field1::abs_average(Iv q) const {
    double acc = 0;
    int span = grid->leaf_span(q.gen);
    for (int n = 0; n < span; ++n) acc += v.col(grid->leaf_at(q, n)).norm();
    return acc / double(span);
}

double Field1::norm_l2() const { return std::sqrt(v.squaredNorm() * leaf_measure()); }

double Field1::norm_lp(double p) const {
    double acc = 0;
    for (int c = 0; c < v.cols(); ++c) acc += std::pow(v.col(c).norm(), p);
    return std::pow(acc * leaf_measure(), 1.0 / p);
}

Eigen::VectorXd Field2::sum(Rect r) const {
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(dim());
    for (int c : grid->cells_of(r)) acc += v.col(c);
    return acc * leaf_measure();
}

Eigen::VectorXd Field2::average(Rect r) const { return sum(r) / grid->measure(r); }

double Field2::abs_average(Rect r) const {
    double acc = 0;
    auto cells = grid->cells_of(r);
    for (int c : cells) acc += v.col(c).norm();
    return acc / double(cells.size());
}

double Field2::norm_l2() const { return std::sqrt(v.squaredNorm() * leaf_measure()); }

double Field2::norm_lp(double p) const {
    double acc = 0;
    for (int c = 0; c < v.cols(); ++c) acc += std::pow(v.col(c).norm(), p);
    return std::pow(acc * leaf_measure(), 1.0 / p);
}

double scalar_average(const Field2& f, Rect r) { return f.average(r)(0); }
double scalar_average(const Field1& f, Iv q) { return f.average(q)(0); }

double pairing(const Field2& f, const Field2& g) {
    return f.v.cwiseProduct(g.v).sum() * f.leaf_measure();
}

double pairing(const Field1& f, const Field1& g) {
    return f.v.cwiseProduct(g.v).sum() * f.leaf_measure();
}

std::string field_to_json(const Field2& f) {
    nlohmann::json j;
    j["dim"] = f.dim();
    std::vector<std::vector<double>> cells;
    cells.reserve(std::size_t(f.v.cols()));
    for (int c = 0; c < f.v.cols(); ++c) {
        std::vector<double> col(f.v.rows());
        for (int r = 0; r < f.v.rows(); ++r) col[std::size_t(r)] = f.v(r, c);
        cells.push_back(std::move(col));
    }
    j["values"] = cells;  // cell-major, cell index = t2*n1 + t1
    return j.dump();
}

Field2 field_from_json(const std::string& text, const ProductGrid& g) {
    nlohmann::json j = nlohmann::json::parse(text);
    int dim = j.at("dim").get<int>();
    auto cells = j.at("values").get<std::vector<std::vector<double>>>();
    if (int(cells.size()) != g.leaf_count()) throw std::invalid_argument("field size does not match grid");
    Field2 f(g, dim);
    for (int c = 0; c < g.leaf_count(); ++c) {
        if (int(cells[std::size_t(c)].size()) != dim) throw std::invalid_argument("bad field cell dim");
        for (int r = 0; r < dim; ++r) f.v(r, c) = cells[std::size_t(c)][std::size_t(r)];
    }
    return f;
}

}  // namespace dyad
