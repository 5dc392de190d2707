// Copyright 2026 The ppa-sim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Amplified angle, postselected QFI, optimal measurement and the
// conditional quasiprobability table at one operating point.

#include <cstdio>

#include "ppa/ppa.hpp"

int main() {
    const double theta = 0.2;
    const double t = 0.5;

    const ppa::PpaFamily family = ppa::PpaFamily::qubit(t, 1.0);
    const double p = family.probability(theta);
    std::printf("survival probability  %.6f\n", p);
    std::printf("amplified angle       %.6f rad\n", ppa::amplified_angle(theta, t));
    std::printf("QFI (closed form)     %.6f rad^-2\n", ppa::qfi_ppa_theory(theta, t));

    const auto sld = ppa::sld(family.state(theta), family.derivative(theta));
    std::printf("QFI (SLD)             %.6f rad^-2\n", sld.qfi);

    const auto m = ppa::optimal_measurement(theta, t);
    std::printf("optimal axis          theta_opt=%.6f phi_opt=%.6f\n", m.theta_opt, m.phi_opt);
    std::printf("CFI at that axis      %.6f rad^-2\n", ppa::cfi(m, family, theta));

    const auto table = ppa::conditional_ppa_table(ppa::PpaFamily::qubit(1.0, 1.0).state(theta), t);
    const char *names[2] = {"a+", "a-"};
    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
            std::printf("p(%s,%s|+) = %+.6f %+.6fi\n", names[a], names[b], table[a][b].real(), table[a][b].imag());
        }
    }
    const double gap = ppa::nonclassicality_gap(ppa::from_table(table)).gap;
    std::printf("4 x gap               %.6f rad^-2\n", 4.0 * gap);
    return 0;
}
