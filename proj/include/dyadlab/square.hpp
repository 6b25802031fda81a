#pragma once

#include "dyadlab/haar.hpp"
#include "dyadlab/reducing.hpp"

namespace dyad {

// ---- plain square functions -------------------------------------------------

ScalarField1 square_fn(const Field1& f);                                       // unweighted
ScalarField1 square_fn_reduced(const Field1& f, const IntervalReducing& red);  // S_{D,W}
ScalarField1 square_fn_pointwise(const Field1& f, const Weight1& w, double p); // S~_{D,W}

ScalarField2 square_fn(const Field2& f);
ScalarField2 square_fn_reduced(const Field2& f, const RectReducing& red);
ScalarField2 square_fn_pointwise(const Field2& f, const Weight2& w, double p);

// ---- shifted square functions ------------------------------------------------
// Two algebraically equal displays: the children-indicator double sum and the
// 2^{j/2}-prefactor form; `prefactor_form` picks the evaluation route.

ScalarField1 shifted_square_reduced(const Field1& f, const IntervalReducing& red, int i, int j,
                                    bool prefactor_form = false);
ScalarField1 shifted_square_pointwise(const Field1& f, const Weight1& w, double p, int i, int j,
                                      bool prefactor_form = false);
// starred variant: the absolute value outside the inner coefficient sum
ScalarField1 shifted_square_pointwise_star(const Field1& f, const Weight1& w, double p, int i,
                                           int j);

ScalarField2 shifted_square_reduced(const Field2& f, const RectReducing& red, std::array<int, 2> i,
                                    std::array<int, 2> j, bool prefactor_form = false);
ScalarField2 shifted_square_pointwise(const Field2& f, const Weight2& w, double p,
                                      std::array<int, 2> i, std::array<int, 2> j,
                                      bool prefactor_form = false);
ScalarField2 shifted_square_pointwise_star(const Field2& f, const Weight2& w, double p,
                                           std::array<int, 2> i, std::array<int, 2> j);

// ---- mixed one-parameter-by-one-parameter operators ---------------------------

// [S M~]: joint reducing matrices W_{I x J}
ScalarField2 mixed_sm_tilde(const Field2& f, const RectReducing& red);
// [M~ S]: symmetric counterpart
ScalarField2 mixed_mtilde_s(const Field2& f, const RectReducing& red);
// [S^{i,0} M]: sliced reducing W_{x2, R1}; slices of axis 1
ScalarField2 mixed_si0_m(const Field2& f, const SlicedReducing& slices, int i);
// [M S^{i,0}]: slices of axis 2
ScalarField2 mixed_m_si0(const Field2& f, const SlicedReducing& slices, int i);
// [S^{j,0} S~]: sliced reducing W_{x2, R1} against the pointwise axis-2 square sum
ScalarField2 mixed_sj0_stilde(const Field2& f, const SlicedReducing& slices, int j);
// [S~ S^{j,0}]: symmetric counterpart
ScalarField2 mixed_stilde_sj0(const Field2& f, const SlicedReducing& slices, int j);
// [S M]: slice-then-reduce W_{x2, I} (collapses to [S^{0,0} M])
ScalarField2 mixed_sm(const Field2& f, const SlicedReducing& slices);
// [S~ M~]: W_{x1, J}, sliced along axis 2
ScalarField2 mixed_stilde_mtilde(const Field2& f, const SlicedReducing& slices);

}  // namespace dyad
