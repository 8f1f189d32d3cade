#include <iostream>

#include "sublin/acceptance.hpp"

int main() {
    const auto reports = sublin::run_acceptance(std::cout);
    int failed = 0;
    for (const auto& r : reports) failed += !r.passed;
    std::cout << reports.size() - failed << "/" << reports.size() << " acceptance checks passed\n";
    return failed == 0 ? 0 : 1;
}
