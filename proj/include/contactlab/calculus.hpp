#pragma once

#include "contactlab/forms.hpp"

namespace contactlab {

DifferentialForm wedge(const DifferentialForm& a, const DifferentialForm& b,
                       const DiffBackend& be);

DifferentialForm exterior_derivative(const DifferentialForm& a, const DiffBackend& be);

DifferentialForm interior_product(const VectorField& X, const DifferentialForm& a,
                                  const DiffBackend& be);

// Cartan formula d(i_X a) + i_X(da); degree 0 reduces to i_X(da).
DifferentialForm lie_derivative(const VectorField& X, const DifferentialForm& a,
                                const DiffBackend& be);

DifferentialForm pullback(const ChartMap& phi, const DifferentialForm& a,
                          const DiffBackend& be);

// Convenience builders.
DifferentialForm one_form(ChartPtr chart, std::vector<SmoothFn> coeffs);
DifferentialForm function_form(ChartPtr chart, SmoothFn f);
DifferentialForm coordinate_differential(ChartPtr chart, int i);  // dx^i

DifferentialForm scale(const DifferentialForm& a, double c);
DifferentialForm add(const DifferentialForm& a, const DifferentialForm& b);

}  // namespace contactlab
