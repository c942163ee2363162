#pragma once

// Direct solvers for the Newton systems: a general banded LU on top of
// LAPACK's dgbtrf/dgbtrs, and a cyclic variant that handles the wrap-around
// corners of periodic stencils through a rank-4 correction, so the band
// factorization itself never sees the corners.

#include <array>
#include <vector>

namespace thinfilm {

class BandedLU {
  public:
    BandedLU(int n, int kl, int ku);

    void zero();
    // Entry (i, j), zero-based, with j - i in [-kl, ku].
    double& at(int i, int j);

    bool factor(); // false if the band is numerically singular
    void solve(std::vector<double>& b) const;
    void solve(double* b, int nrhs) const;

    int size() const { return n_; }

  private:
    int n_, kl_, ku_, ldab_;
    std::vector<double> ab_;       // assembly storage
    std::vector<double> lu_;       // factored copy
    std::vector<int> ipiv_;
    bool factored_ = false;
};

// Pentadiagonal system with periodic wrap (kl = ku = 2). Assembly addresses
// entries by cyclic offset; the eight wrap entries go to the corner blocks
// and are folded back in at solve time:
//   (B + U V^T)^{-1} = B^{-1} - B^{-1} U (I + V^T B^{-1} U)^{-1} V^T B^{-1},
// with U the unit columns of the four corner-carrying rows.
class CyclicPentaSolver {
  public:
    explicit CyclicPentaSolver(int n);

    void zero();
    // Row i, column (i + off) mod n, off in [-2, 2].
    double& at_offset(int i, int off);

    bool factor();
    bool solve(std::vector<double>& b);

    int size() const { return n_; }

  private:
    int n_;
    BandedLU band_;
    std::array<double, 8> corner_{};        // row-major over the 8 wrap slots
    std::array<double, 16> capacitance_{};  // I + V^T B^{-1} U, factored
    std::array<int, 4> cap_piv_{};
    std::vector<double> binv_u_;            // n x 4, column-major
    bool factored_ = false;

    double* corner_slot(int i, int j);
};

} // namespace thinfilm
