// Acceptance checks: one PASS/FAIL line per criterion.
#include "mwd/verify.hpp"

#include <cstdlib>
#include <cstring>
#include <iostream>
#include <thread>

int main(int argc, char** argv)
{
    mwd::verify::Options o;
    o.log = &std::cerr;
    o.threads = int(std::max(1u, std::thread::hardware_concurrency()));
    for (int i = 1; i < argc; ++i)
    {
        if (!std::strcmp(argv[i], "--skip-slow"))
            o.slow = false;
        else
            o.only.push_back(std::atoi(argv[i]));
    }
    auto const results = mwd::verify::run_all(o);
    int const failed = mwd::verify::report(std::cout, results);
    std::cout << results.size() - failed << "/" << results.size() << " criteria passed\n";
    return failed == 0 ? 0 : 1;
}
