// Walk the perturbation expansion of the 5-cycle at p = 1/2: print the full
// coefficient table, then confirm the identity
//   rho(W_p + D) - rand(F,p) = sum_H P_{H,F}(p) t(H,D)
// bit-exactly for one concrete two-block kernel D.

#include <iostream>

#include "stepcert/expansion.hpp"

int main() {
    using namespace stepcert;

    Graph c5 = named_graph("C5");
    Rational p = rat(1, 2);
    ExpansionTable table = build_table(c5);
    std::cout << table_csv(table, p) << "\n";

    StepKernel d = make_step_kernel({rat(1, 3), rat(2, 3)},
                                    {{rat(1, 5), rat(-1, 10)}, {rat(-1, 10), rat(1, 20)}});
    Rational lhs = rho_induced(c5, add(constant(p), d)) - rand_density(c5, p);
    Rational rhs = rat(0);
    for (const auto& [h, entry] : table.entries)
        rhs += eval_P(table, h, p) * t_hom(h.to_graph(), d);

    std::cout << "direct:   " << rat_str(lhs) << "\n";
    std::cout << "expanded: " << rat_str(rhs) << "\n";
    return lhs == rhs ? 0 : 1;
}
