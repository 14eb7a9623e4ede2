// Enumerates the critical configurations of the one-piece necklace ((4, 4))
// and prints each with its closed-form and eigenvalue Morse indices.

#include <cstdio>

#include "necklace/critical.hpp"
#include "necklace/morse.hpp"

int main() {
    const necklace::Necklace N({{4, 4.0}});
    const necklace::CriticalSet set = necklace::enumerate_critical(N);
    std::printf("dimension %d, %zu critical points, %zu boundary roots\n", necklace::manifold_dimension(N),
                set.interior.size(), set.boundary.size());
    int mismatches = 0;
    for (const necklace::CriticalConfig& c : set.interior) {
        const necklace::MorseReport m = necklace::morse_report(c, N);
        std::printf("w=%+d  E=%+d  R=%.6f  area=%+.6f  formula=%d  signature=(%d,%d,%d)\n", c.winding, c.signs[0],
                    c.radius, c.area, m.formula_index.value_or(-1), m.signature.negative, m.signature.zero,
                    m.signature.positive);
        mismatches += m.agree ? 0 : 1;
    }
    return mismatches == 0 ? 0 : 1;
}
