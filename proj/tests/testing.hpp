#pragma once

#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

// Minimal harness: register cases, run them, print one passed/failed line each.
namespace testing {

struct Failure {
    std::string what;
};

inline int& failure_count() {
    static int n = 0;
    return n;
}

inline void run_case(const char* name, const std::function<void()>& fn) {
    try {
        fn();
        std::printf("passed: %s\n", name);
    } catch (const Failure& f) {
        ++failure_count();
        std::printf("FAILED: %s (%s)\n", name, f.what.c_str());
    } catch (const std::exception& e) {
        ++failure_count();
        std::printf("FAILED: %s (unexpected exception: %s)\n", name, e.what());
    }
}

inline int summary() {
    if (failure_count() == 0) {
        std::printf("all tests passed\n");
        return 0;
    }
    std::printf("%d test(s) FAILED\n", failure_count());
    return 1;
}

}  // namespace testing

#define CHECK(cond)                                                                     \
    do {                                                                                \
        if (!(cond)) throw testing::Failure{std::string("CHECK failed: ") + #cond +     \
                                            " at " + __FILE__ + ":" +                   \
                                            std::to_string(__LINE__)};                  \
    } while (0)

#define CHECK_CLOSE(a, b, tol)                                                          \
    do {                                                                                \
        const double va = (a), vb = (b);                                                \
        if (!(std::abs(va - vb) <= (tol)))                                              \
            throw testing::Failure{std::string("CHECK_CLOSE failed: ") + #a + " = " +   \
                                   std::to_string(va) + " vs " + #b + " = " +           \
                                   std::to_string(vb) + " at " + __FILE__ + ":" +       \
                                   std::to_string(__LINE__)};                           \
    } while (0)

#define CHECK_THROWS(expr)                                                              \
    do {                                                                                \
        bool thrown = false;                                                            \
        try {                                                                           \
            (void)(expr);                                                               \
        } catch (...) {                                                                 \
            thrown = true;                                                              \
        }                                                                               \
        if (!thrown) throw testing::Failure{std::string("expected an exception: ") +    \
                                            #expr};                                     \
    } while (0)

#define TEST_CASE(name) testing::run_case(name, [&]()
#define TEST_END )
