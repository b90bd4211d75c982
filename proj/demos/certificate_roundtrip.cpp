// Certificate lifecycle: build a full certificate for the 4-clique at
// p = 1/2, validate it, corrupt one field and watch validation name the
// failure, then show both outcomes of the linear route on path3+v.

#include <iostream>

#include "stepcert/certifier.hpp"

int main() {
    using namespace stepcert;

    Certificate c = certify_full(named_graph("K4"), rat(1, 2), rat(1, 4));
    std::cout << "K4 at 1/2: gap = " << quad_str(c.gap) << ", N = " << c.n << ", z = " << c.z
              << ", W choice = " << c.w_choice << "\n";
    std::cout << "validate:  " << (validate_certificate(c).ok ? "ok" : "rejected") << "\n";

    Certificate bad = c;
    bad.lambda /= rat(2);
    std::cout << "tampered lambda: " << validate_certificate(bad).first_failure << "\n";

    try {
        certify_linear(named_graph("path3+v"), rat(2, 5));
    } catch (const Error& e) {
        std::cout << "linear route at 2/5 refused: " << e.what() << "\n";
    }
    LinearCertificate lc = certify_linear(named_graph("path3+v"), rat(3, 10));
    std::cout << "linear route at 3/10: sigma = " << lc.sigma << ", eps = " << rat_str(lc.eps)
              << ", gap = " << rat_str(lc.gap) << "\n";
    return 0;
}
