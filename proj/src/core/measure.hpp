#pragma once

#include <vector>

namespace gfd {

struct DiscreteMeasure {
  std::vector<double> atoms;  // strictly increasing
  std::vector<double> weights;
  double total_mass = 0.0;

  std::size_t size() const { return atoms.size(); }
  // Throws structural error when the invariants fail.
  void validate() const;
  // Sorts by atom and merges atoms closer than tol (toward the smaller atom).
  static DiscreteMeasure from_points(std::vector<double> atoms, std::vector<double> weights, double tol = 1e-14);
  static DiscreteMeasure dirac(double x, double mass = 1.0);
};

}  // namespace gfd
