// Certified pressure of the golden-mean tree-shift for a few tree degrees,
// printed in base 10 next to the two limit anchors.

#include <cmath>
#include <cstdio>

#include "treepress/pressure.hpp"

int main() {
  using namespace treepress;
  const InteractionSystem golden(Matrix{{1, 1}, {1, 0}});
  const double ln10 = std::log(10.0);
  std::printf("log10 rho(G) = %.6f, log10 r_G = %.6f\n", std::log(spectral_radius(golden)) / ln10,
              std::log(max_column_sum(golden)) / ln10);
  for (double d : {1.01, 1.5, 2.0, 3.0, 8.0, 64.0}) {
    const PressureCertificate c = pressure_certificate(golden, d, 1e-8);
    std::printf("d = %6.2f  k = %5zu  pressure in [%.8f, %.8f]\n", d, c.k, c.lo / ln10, c.hi / ln10);
  }
}
