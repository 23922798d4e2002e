#pragma once

#include "cls/core.hpp"

#include <array>

namespace testutil {

// Coefficients a[i][j] of x^i y^j from the 16 interpolation conditions
// (value, d/dx, d/dy, d2/dxdy at the unit-square corners), solved by exact
// Gaussian elimination.  Indexing of the data is [i][j] with i the x offset.
inline std::array<std::array<cls::Rational, 4>, 4> bicubic_by_elimination(const cls::Rational f[2][2],
                                                                          const cls::Rational fx[2][2],
                                                                          const cls::Rational fy[2][2],
                                                                          const cls::Rational fxy[2][2]) {
  using cls::Rational;
  std::array<std::array<Rational, 17>, 16> M;
  int row = 0;
  for (int cx = 0; cx < 2; ++cx)
    for (int cy = 0; cy < 2; ++cy)
      for (int kind = 0; kind < 4; ++kind) {
        const int dx = kind & 1, dy = kind >> 1;
        for (int i = 0; i < 4; ++i)
          for (int j = 0; j < 4; ++j) {
            Rational c = 0;
            if (i >= dx && j >= dy) {
              c = 1;
              if (dx) c *= i;
              if (dy) c *= j;
              for (int k = 0; k < i - dx; ++k) c *= cx;
              for (int k = 0; k < j - dy; ++k) c *= cy;
            }
            M[row][4 * i + j] = c;
          }
        const Rational* src[4] = {&f[cx][cy], &fx[cx][cy], &fy[cx][cy], &fxy[cx][cy]};
        M[row][16] = *src[kind];
        ++row;
      }
  for (int col = 0; col < 16; ++col) {
    int p = col;
    while (M[p][col] == 0) ++p;
    std::swap(M[p], M[col]);
    for (int r = 0; r < 16; ++r) {
      if (r == col || M[r][col] == 0) continue;
      const Rational q = M[r][col] / M[col][col];
      for (int k = col; k < 17; ++k) M[r][k] -= q * M[col][k];
    }
  }
  std::array<std::array<Rational, 4>, 4> a;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) a[i][j] = M[4 * i + j][16] / M[4 * i + j][4 * i + j];
  return a;
}

}  // namespace testutil
