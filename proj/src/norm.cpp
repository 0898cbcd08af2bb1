#include "bratteli/norm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/SVD>

namespace bratteli {

std::vector<double> singular_values(std::span<const double> a, std::size_t rows,
                                    std::size_t cols, double tolerance) {
  if (rows == 0 || cols == 0) return {};
  const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> m(
      a.data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  Eigen::JacobiSVD<Eigen::MatrixXd> svd;
  svd.setThreshold(std::max(tolerance * 1e-3, 1e-15));
  svd.compute(m);
  const auto& v = svd.singularValues();  // already descending
  return std::vector<double>(v.data(), v.data() + v.size());
}

double largest_singular_value(std::span<const double> a, std::size_t rows, std::size_t cols,
                              double tolerance) {
  auto sv = singular_values(a, rows, cols, tolerance);
  return sv.empty() ? 0.0 : sv.front();
}

namespace {

struct DisjointSets {
  std::vector<std::size_t> parent;
  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
};

}  // namespace

double operator_norm(const Element& x, double tolerance) {
  // Rows are nodes [0, m), columns are nodes [m, 2m).
  const std::size_t m = x.algebra().total_size();
  if (x.is_zero()) return 0.0;
  DisjointSets sets(2 * m);
  for (const auto& [p, v] : x.entries()) sets.unite(p.row, m + p.col);

  std::map<std::size_t, std::vector<std::pair<IndexPair, double>>> components;
  for (const auto& [p, v] : x.entries()) components[sets.find(p.row)].push_back({p, v.get_d()});

  double best = 0.0;
  for (auto& [root, entries] : components) {
    std::vector<std::size_t> rows, cols;
    for (const auto& [p, v] : entries) {
      rows.push_back(p.row);
      cols.push_back(p.col);
    }
    std::sort(rows.begin(), rows.end());
    rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
    std::sort(cols.begin(), cols.end());
    cols.erase(std::unique(cols.begin(), cols.end()), cols.end());
    std::vector<double> dense(rows.size() * cols.size(), 0.0);
    for (const auto& [p, v] : entries) {
      const auto r = std::lower_bound(rows.begin(), rows.end(), p.row) - rows.begin();
      const auto c = std::lower_bound(cols.begin(), cols.end(), p.col) - cols.begin();
      dense[r * cols.size() + c] = v;
    }
    best = std::max(best, largest_singular_value(dense, rows.size(), cols.size(), tolerance));
  }
  return best;
}

}  // namespace bratteli
