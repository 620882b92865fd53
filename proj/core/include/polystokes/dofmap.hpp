#pragma once

#include "polystokes/types.hpp"

namespace polystokes {

/// Global numbering of the discontinuous velocity and pressure unknowns.
///
/// Velocity: one contiguous block of dim * C(k+d, d) entries per element,
/// component-major inside the block. Pressure: one block of C(k-1+d, d)
/// entries per element. Both blocks follow element order.
struct DofMap {
  int dim = 2;
  int k = 1;
  int n_elements = 0;

  int velocity_basis_size() const { return polynomial_space_dim(dim, k); }
  int velocity_block_size() const { return dim * velocity_basis_size(); }
  int pressure_block_size() const { return polynomial_space_dim(dim, k - 1); }

  int n_velocity() const { return n_elements * velocity_block_size(); }
  int n_pressure() const { return n_elements * pressure_block_size(); }

  int velocity_offset(int element) const { return element * velocity_block_size(); }
  int velocity_index(int element, int component, int basis) const {
    return velocity_offset(element) + component * velocity_basis_size() + basis;
  }
  int pressure_offset(int element) const { return element * pressure_block_size(); }
};

}  // namespace polystokes
