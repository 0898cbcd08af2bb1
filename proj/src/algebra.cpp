#include "bratteli/algebra.hpp"

#include <algorithm>

#include "bratteli/error.hpp"

namespace bratteli {

std::string to_string(const Rational& q) {
  Rational c = q;
  c.canonicalize();
  return c.get_num().get_str() + "/" + c.get_den().get_str();
}

Rational parse_rational(const std::string& text) {
  Rational q;
  if (text.empty() || q.set_str(text, 10) != 0 || q.get_den() == 0)
    throw ValidationError("not a rational: '" + text + "'");
  q.canonicalize();
  return q;
}

Algebra Algebra::make(std::vector<std::size_t> sizes) {
  if (sizes.empty()) throw ValidationError("algebra needs at least one summand");
  Algebra a;
  a.sizes_ = std::move(sizes);
  a.offsets_.reserve(a.sizes_.size());
  for (std::size_t s = 0; s < a.sizes_.size(); ++s) {
    if (a.sizes_[s] == 0) throw ValidationError("summand sizes must be positive");
    a.offsets_.push_back(a.total_);
    a.total_ += a.sizes_[s];
    a.owner_.insert(a.owner_.end(), a.sizes_[s], s);
  }
  return a;
}

std::size_t Algebra::dimension() const noexcept {
  std::size_t d = 0;
  for (auto n : sizes_) d += n * n;
  return d;
}

std::size_t Algebra::summand_of(std::size_t global) const {
  if (global >= total_) throw RangeError("global index out of range");
  return owner_[global];
}

std::size_t Algebra::global(std::size_t summand, std::size_t local) const {
  if (summand >= sizes_.size()) throw RangeError("summand out of range");
  if (local >= sizes_[summand]) throw RangeError("local index out of range");
  return offsets_[summand] + local;
}

bool Algebra::contains(IndexPair p) const {
  return p.row < total_ && p.col < total_ && owner_[p.row] == owner_[p.col];
}

std::vector<IndexPair> Algebra::basis() const {
  std::vector<IndexPair> out;
  out.reserve(dimension());
  for (std::size_t s = 0; s < sizes_.size(); ++s)
    for (std::size_t i = 0; i < sizes_[s]; ++i)
      for (std::size_t j = 0; j < sizes_[s]; ++j)
        out.push_back({offsets_[s] + i, offsets_[s] + j});
  return out;
}

void normalize(UnitSum& sum) {
  std::sort(sum.begin(), sum.end(),
            [](const Term& a, const Term& b) { return a.at < b.at; });
  std::size_t w = 0;
  for (std::size_t r = 0; r < sum.size();) {
    Term t = sum[r++];
    while (r < sum.size() && sum[r].at == t.at) t.coeff += sum[r++].coeff;
    if (t.coeff != 0) sum[w++] = t;
  }
  sum.resize(w);
}

Element Element::identity(const Algebra& algebra) {
  Element e(algebra);
  for (std::size_t g = 0; g < algebra.total_size(); ++g) e.entries_[{g, g}] = 1;
  return e;
}

Element Element::from_units(const Algebra& algebra, const UnitSum& sum) {
  Element e(algebra);
  for (const auto& t : sum) e.add_to(t.at, Rational(static_cast<long>(t.coeff)));
  return e;
}

Rational Element::get(IndexPair p) const {
  auto it = entries_.find(p);
  return it == entries_.end() ? Rational(0) : it->second;
}

void Element::set(IndexPair p, const Rational& value) {
  if (!algebra_.contains(p)) throw ValidationError("entry outside block-diagonal support");
  if (value == 0)
    entries_.erase(p);
  else
    entries_[p] = value;
}

void Element::add_to(IndexPair p, const Rational& value) {
  if (!algebra_.contains(p)) throw ValidationError("entry outside block-diagonal support");
  auto [it, inserted] = entries_.try_emplace(p, value);
  if (!inserted) it->second += value;
  if (it->second == 0) entries_.erase(it);
}

std::vector<double> Element::dense_block(std::size_t summand) const {
  const std::size_t n = algebra_.size(summand);
  const std::size_t off = algebra_.offset(summand);
  std::vector<double> out(n * n, 0.0);
  auto it = entries_.lower_bound({off, 0});
  for (; it != entries_.end() && it->first.row < off + n; ++it)
    out[(it->first.row - off) * n + (it->first.col - off)] = it->second.get_d();
  return out;
}

Element matrix_unit(const Algebra& algebra, std::size_t summand, std::size_t i, std::size_t j) {
  if (summand >= algebra.summands() || i >= algebra.size(summand) || j >= algebra.size(summand))
    throw ValidationError("matrix unit index out of range");
  Element e(algebra);
  e.set({algebra.global(summand, i), algebra.global(summand, j)}, 1);
  return e;
}

static void require_same(const Element& x, const Element& y) {
  if (!(x.algebra() == y.algebra())) throw ValidationError("algebra mismatch");
}

Element add(const Element& x, const Element& y) {
  require_same(x, y);
  Element out = x;
  for (const auto& [p, v] : y.entries()) out.add_to(p, v);
  return out;
}

Element scale(const Element& x, const Rational& c) {
  Element out(x.algebra());
  if (c == 0) return out;
  for (const auto& [p, v] : x.entries()) out.set(p, v * c);
  return out;
}

Element multiply(const Element& x, const Element& y) {
  require_same(x, y);
  Element out(x.algebra());
  const auto& ye = y.entries();
  for (const auto& [p, v] : x.entries()) {
    for (auto it = ye.lower_bound({p.col, 0}); it != ye.end() && it->first.row == p.col; ++it)
      out.add_to({p.row, it->first.col}, v * it->second);
  }
  return out;
}

Element adjoint(const Element& x) {
  Element out(x.algebra());
  for (const auto& [p, v] : x.entries()) out.set({p.col, p.row}, v);
  return out;
}

Element operator+(const Element& x, const Element& y) { return add(x, y); }
Element operator*(const Element& x, const Element& y) { return multiply(x, y); }

bool is_upper(const Algebra& algebra, IndexPair p) {
  return algebra.contains(p) && p.row <= p.col;
}

bool is_strictly_upper(const Algebra& algebra, IndexPair p) {
  return algebra.contains(p) && p.row < p.col;
}

bool is_upper_triangular(const Element& x) {
  return std::all_of(x.entries().begin(), x.entries().end(),
                     [](const auto& e) { return e.first.row <= e.first.col; });
}

std::vector<IndexPair> triangular_basis(const Algebra& algebra, bool strict) {
  std::vector<IndexPair> out;
  for (const auto& p : algebra.basis())
    if (strict ? p.row < p.col : p.row <= p.col) out.push_back(p);
  return out;
}

Algebra tensor_with_matrix(const Algebra& algebra, std::size_t d) {
  if (d == 0) throw ValidationError("tensor factor must be positive");
  std::vector<std::size_t> sizes;
  for (auto n : algebra.sizes()) sizes.push_back(n * d);
  return Algebra::make(std::move(sizes));
}

}  // namespace bratteli
