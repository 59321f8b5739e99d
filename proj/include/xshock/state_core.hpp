// Lattices, scalar fields, interpolation and finite differences.
#pragma once

#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace xs {

struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct StencilError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Uniform lattice x_i = x0 + i*dx, y_j = y0 + j*dy with a node mask.
// The region predicate is the continuous domain used for hull checks.
class Lattice {
 public:
  using Keep = std::function<bool(int, int)>;
  using Region = std::function<bool(double, double)>;

  Lattice(double x0, double dx, int nx, double y0, double dy, int ny,
          Keep keep = {}, Region region = {});
  virtual ~Lattice() = default;

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double x0() const { return x0_; }
  double y0() const { return y0_; }
  double dx() const { return dx_; }
  double dy() const { return dy_; }
  double x(int i) const { return x0_ + i * dx_; }
  double y(int j) const { return y0_ + j * dy_; }
  double x_max() const { return x(nx_ - 1); }
  double y_max() const { return y(ny_ - 1); }

  bool has(int i, int j) const;
  int index(int i, int j) const;  // -1 when absent
  std::size_t size() const { return nodes_.size(); }
  std::pair<int, int> node(std::size_t k) const { return nodes_[k]; }
  bool contains(double x, double y) const;
  std::string bounds() const;

 private:
  double x0_, dx_;
  int nx_;
  double y0_, dy_;
  int ny_;
  Region region_;
  std::vector<int> map_;
  std::vector<std::pair<int, int>> nodes_;
};

// Triangular double-null lattice {0 <= v_j <= u_i <= tau_hat}; row-major
// so node (i, j) sits at i(i+1)/2 + j.
class NullGrid : public Lattice {
 public:
  NullGrid(double delta, int rows);
  double delta() const { return dx(); }
  int rows() const { return nx(); }
  double tau_hat() const { return x_max(); }
};

// Rectangular (tau, chi) lattice restricted to tau >= past(chi).
class ComovingGrid : public Lattice {
 public:
  ComovingGrid(double tau0, double dtau, int ntau, double chi0, double dchi,
               int nchi, std::function<double(double)> past);
  double past(double chi) const { return past_(chi); }

 private:
  std::function<double(double)> past_;
};

struct ScalarField {
  ScalarField(std::shared_ptr<const Lattice> g, std::vector<double> v,
              std::string n);
  std::shared_ptr<const Lattice> grid;
  std::vector<double> values;
  std::string name;

  double at(int i, int j) const;
};

// Build a field by evaluating f at every node.
ScalarField sample_field(std::shared_ptr<const Lattice> grid,
                         const std::function<double(double, double)>& f,
                         std::string name);

double interpolate_field(const ScalarField& field, double x, double y);

// Partial derivative d^(ox+oy)/dx^ox dy^oy at a lattice node, order 2.
double finite_difference(const ScalarField& field, double x, double y, int ox,
                         int oy);

// Fornberg weights for derivative order m at z on nodes xs.
std::vector<double> fornberg_weights(double z, const std::vector<double>& xs,
                                     int m);

}  // namespace xs
