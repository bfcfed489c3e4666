#pragma once

#include "qsu2/algebra.hpp"

namespace qsu2::oracle {

/// Basis vector e_k (x) u^winding of the ladder representation on l^2(N) (x) L^2(circle):
///   alpha e_k = sqrt(1 - q^{-2(k+1)}) e_{k+1},   gamma e_k = q^{-(k+1)} u e_k.
struct LadderState {
    int k = 0;
    int winding = 0;
};

struct LadderResult {
    double amplitude = 0.0;
    LadderState state;
};

/// Applies a word (rightmost letter first) to e_k. A zero amplitude means the
/// word annihilated the state (alpha* on e_0). Throws LevelOverflow when an
/// intermediate level exceeds `ceiling`.
LadderResult rep_apply(const Word& word, int k, double q, int ceiling);

/// Circle-averaged vacuum-weighted trace
///   psi(p) = (1 - q^{-2}) sum_{k=0}^{K} q^{-2k} <e_k, p e_k>_{winding 0}.
/// The tail beyond K is of relative size q^{-2(K+1)}. Requires q > 1.
Complex oracle_haar(const NCPolynomial& p, int K, double q);

} // namespace qsu2::oracle
