#include "xshock/state_core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace xs {

Lattice::Lattice(double x0, double dx, int nx, double y0, double dy, int ny,
                 Keep keep, Region region)
    : x0_(x0), dx_(dx), nx_(nx), y0_(y0), dy_(dy), ny_(ny),
      region_(std::move(region)) {
  if (!(dx > 0) || !(dy > 0) || nx < 1 || ny < 1)
    throw std::invalid_argument("lattice: bad spacing or extent");
  map_.assign(static_cast<std::size_t>(nx) * ny, -1);
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j) {
      if (keep && !keep(i, j)) continue;
      map_[static_cast<std::size_t>(i) * ny + j] = static_cast<int>(nodes_.size());
      nodes_.emplace_back(i, j);
    }
  if (nodes_.empty()) throw std::invalid_argument("lattice: no nodes");
}

bool Lattice::has(int i, int j) const { return index(i, j) >= 0; }

int Lattice::index(int i, int j) const {
  if (i < 0 || j < 0 || i >= nx_ || j >= ny_) return -1;
  return map_[static_cast<std::size_t>(i) * ny_ + j];
}

bool Lattice::contains(double x, double y) const {
  const double ex = 1e-12 * (1.0 + std::abs(x_max()) + std::abs(x0_));
  const double ey = 1e-12 * (1.0 + std::abs(y_max()) + std::abs(y0_));
  if (x < x0_ - ex || x > x_max() + ex || y < y0_ - ey || y > y_max() + ey)
    return false;
  return !region_ || region_(x, y);
}

std::string Lattice::bounds() const {
  std::ostringstream os;
  os.precision(17);
  os << "[" << x0_ << ", " << x_max() << "] x [" << y0_ << ", " << y_max()
     << "], " << size() << " nodes";
  return os.str();
}

NullGrid::NullGrid(double delta, int rows)
    : Lattice(
          0.0, delta, rows, 0.0, delta, rows,
          [](int i, int j) { return j <= i; },
          [delta](double u, double v) {
            return v >= -1e-12 * delta && v <= u + 1e-12 * delta;
          }) {}

ComovingGrid::ComovingGrid(double tau0, double dtau, int ntau, double chi0,
                           double dchi, int nchi,
                           std::function<double(double)> past)
    : Lattice(
          tau0, dtau, ntau, chi0, dchi, nchi,
          [=](int i, int j) {
            return tau0 + i * dtau >= past(chi0 + j * dchi) - 1e-12 * dtau;
          },
          [=](double t, double c) { return t >= past(c) - 1e-12 * dtau; }),
      past_(std::move(past)) {}

ScalarField::ScalarField(std::shared_ptr<const Lattice> g, std::vector<double> v,
                         std::string n)
    : grid(std::move(g)), values(std::move(v)), name(std::move(n)) {
  if (!grid) throw std::invalid_argument("field '" + name + "': null grid");
  if (values.size() != grid->size())
    throw std::invalid_argument("field '" + name + "': value count mismatch");
  for (double x : values)
    if (!std::isfinite(x))
      throw std::invalid_argument("field '" + name + "': non-finite value");
}

double ScalarField::at(int i, int j) const {
  const int k = grid->index(i, j);
  if (k < 0) throw DomainError("field '" + name + "': no node at index");
  return values[static_cast<std::size_t>(k)];
}

ScalarField sample_field(std::shared_ptr<const Lattice> grid,
                         const std::function<double(double, double)>& f,
                         std::string name) {
  std::vector<double> v(grid->size());
  for (std::size_t k = 0; k < v.size(); ++k) {
    auto [i, j] = grid->node(k);
    v[k] = f(grid->x(i), grid->y(j));
  }
  return ScalarField(std::move(grid), std::move(v), std::move(name));
}

std::vector<double> fornberg_weights(double z, const std::vector<double>& xs,
                                     int m) {
  const int n = static_cast<int>(xs.size()) - 1;
  std::vector<std::vector<double>> c(n + 1, std::vector<double>(m + 1, 0.0));
  double c1 = 1.0, c4 = xs[0] - z;
  c[0][0] = 1.0;
  for (int i = 1; i <= n; ++i) {
    const int mn = std::min(i, m);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = xs[i] - z;
    for (int j = 0; j < i; ++j) {
      const double c3 = xs[i] - xs[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k)
          c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k)
        c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(n + 1);
  for (int i = 0; i <= n; ++i) w[i] = c[i][m];
  return w;
}

namespace {

// Candidate window starts of `npts` nodes near fractional index f, nearest
// first, clamped to the lattice extent.
std::vector<int> window_starts(double f, int npts, int n) {
  std::vector<int> out;
  if (npts > n) return out;
  const int lo = std::max(0, static_cast<int>(std::floor(f)) - npts);
  const int hi = std::min(n - npts, static_cast<int>(std::floor(f)) + 1);
  for (int s = lo; s <= hi; ++s) out.push_back(s);
  const double centre = f - 0.5 * (npts - 1);
  std::stable_sort(out.begin(), out.end(), [centre](int a, int b) {
    return std::abs(a - centre) < std::abs(b - centre);
  });
  return out;
}

std::vector<double> lagrange_weights(double f, int s, int npts) {
  std::vector<double> w(npts, 1.0);
  for (int a = 0; a < npts; ++a)
    for (int b = 0; b < npts; ++b)
      if (a != b) w[a] *= (f - (s + b)) / static_cast<double>(a - b);
  return w;
}

bool block_valid(const Lattice& g, int sx, int nx, int sy, int ny) {
  for (int a = 0; a < nx; ++a)
    for (int b = 0; b < ny; ++b)
      if (!g.has(sx + a, sy + b)) return false;
  return true;
}

}  // namespace

double interpolate_field(const ScalarField& field, double x, double y) {
  const Lattice& g = *field.grid;
  if (!g.contains(x, y)) {
    std::ostringstream os;
    os.precision(17);
    os << "interpolate_field('" << field.name << "'): point (" << x << ", "
       << y << ") outside grid " << g.bounds();
    throw DomainError(os.str());
  }
  const double fx = (x - g.x0()) / g.dx();
  const double fy = (y - g.y0()) / g.dy();
  for (int p = 3; p >= 0; --p) {
    const int npts = p + 1;
    const auto sxs = window_starts(fx, npts, g.nx());
    const auto sys = window_starts(fy, npts, g.ny());
    // Pairs ordered by combined distance; a valid block may sit slightly
    // off the enclosing cell near a masked boundary.
    struct Cand {
      int sx, sy;
      double d;
    };
    std::vector<Cand> cands;
    const double cx = fx - 0.5 * p, cy = fy - 0.5 * p;
    for (int sx : sxs)
      for (int sy : sys)
        cands.push_back({sx, sy, std::abs(sx - cx) + std::abs(sy - cy)});
    std::stable_sort(cands.begin(), cands.end(),
                     [](const Cand& a, const Cand& b) { return a.d < b.d; });
    for (const auto& c : cands) {
      if (c.d > p + 1.5) break;
      if (!block_valid(g, c.sx, npts, c.sy, npts)) continue;
      const auto wx = lagrange_weights(fx, c.sx, npts);
      const auto wy = lagrange_weights(fy, c.sy, npts);
      double acc = 0.0;
      for (int a = 0; a < npts; ++a) {
        double row = 0.0;
        for (int b = 0; b < npts; ++b) row += wy[b] * field.at(c.sx + a, c.sy + b);
        acc += wx[a] * row;
      }
      return acc;
    }
  }
  throw DomainError("interpolate_field('" + field.name +
                    "'): no valid stencil near point");
}

namespace {

// Offsets for a one-dimensional derivative of order o: the symmetric window
// first, then one-sided windows with one extra node, least skewed first.
std::vector<std::vector<int>> fd_windows(int o) {
  std::vector<std::vector<int>> out;
  if (o == 0) return {{0}};
  const int nc = (o % 2 == 1) ? o + 2 : o + 1;
  {
    std::vector<int> w;
    for (int k = 0; k < nc; ++k) w.push_back(k - (nc - 1) / 2);
    out.push_back(w);
  }
  const int n1 = o + 2;
  std::vector<std::vector<int>> skew;
  for (int s = -(n1 - 1); s <= 0; ++s) {
    std::vector<int> w;
    for (int k = 0; k < n1; ++k) w.push_back(s + k);
    skew.push_back(w);
  }
  std::stable_sort(skew.begin(), skew.end(),
                   [n1](const std::vector<int>& a, const std::vector<int>& b) {
                     return std::abs(2 * a[0] + n1 - 1) < std::abs(2 * b[0] + n1 - 1);
                   });
  for (auto& w : skew)
    if (!(n1 == nc && w == out[0])) out.push_back(w);
  return out;
}

}  // namespace

double finite_difference(const ScalarField& field, double x, double y, int ox,
                         int oy) {
  if (ox < 0 || oy < 0 || ox + oy > 3)
    throw std::invalid_argument("finite_difference: order must total <= 3");
  const Lattice& g = *field.grid;
  const double fx = (x - g.x0()) / g.dx();
  const double fy = (y - g.y0()) / g.dy();
  const int i = static_cast<int>(std::lround(fx));
  const int j = static_cast<int>(std::lround(fy));
  if (std::abs(fx - i) > 1e-8 || std::abs(fy - j) > 1e-8 || !g.has(i, j)) {
    std::ostringstream os;
    os.precision(17);
    os << "finite_difference('" << field.name << "'): (" << x << ", " << y
       << ") is not a node of " << g.bounds();
    throw DomainError(os.str());
  }
  const auto wxs = fd_windows(ox);
  const auto wys = fd_windows(oy);
  struct Cand {
    const std::vector<int>* wx;
    const std::vector<int>* wy;
    std::size_t rank;
  };
  std::vector<Cand> cands;
  for (std::size_t a = 0; a < wxs.size(); ++a)
    for (std::size_t b = 0; b < wys.size(); ++b) cands.push_back({&wxs[a], &wys[b], a + b});
  std::stable_sort(cands.begin(), cands.end(),
                   [](const Cand& a, const Cand& b) { return a.rank < b.rank; });
  for (const auto& c : cands) {
    bool ok = true;
    for (int a : *c.wx) {
      for (int b : *c.wy)
        if (!g.has(i + a, j + b)) {
          ok = false;
          break;
        }
      if (!ok) break;
    }
    if (!ok) continue;
    std::vector<double> px(c.wx->begin(), c.wx->end()), py(c.wy->begin(), c.wy->end());
    const auto wx = fornberg_weights(0.0, px, ox);
    const auto wy = fornberg_weights(0.0, py, oy);
    double acc = 0.0;
    for (std::size_t a = 0; a < px.size(); ++a) {
      double row = 0.0;
      for (std::size_t b = 0; b < py.size(); ++b)
        row += wy[b] * field.at(i + (*c.wx)[a], j + (*c.wy)[b]);
      acc += wx[a] * row;
    }
    return acc / (std::pow(g.dx(), ox) * std::pow(g.dy(), oy));
  }
  std::ostringstream os;
  os << "finite_difference('" << field.name << "'): stencil for order (" << ox
     << "," << oy << ") needs " << ox + 2 << "x" << oy + 2
     << " valid nodes around node (" << i << "," << j << ")";
  throw StencilError(os.str());
}

}  // namespace xs
