#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace localsim {

// splitmix64: the seed-splitting primitive used everywhere randomness is
// derived from a master seed (per-node tape streams, per-trial seeds).
inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline uint64_t hash_combine(uint64_t h, uint64_t v) {
    return splitmix64(h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2)));
}

// Exact dyadic rational num / 2^exp with num >= 0. All probability
// arithmetic in correctness paths goes through this type; no floats.
struct Dyadic {
    unsigned __int128 num = 0;
    int exp = 0;

    Dyadic() = default;
    Dyadic(uint64_t n, int e) : num(n), exp(e) { normalize(); }

    static Dyadic zero() { return Dyadic(); }
    static Dyadic one() { return Dyadic(1, 0); }

    void normalize() {
        while (exp > 0 && num != 0 && (num & 1) == 0) {
            num >>= 1;
            --exp;
        }
        if (num == 0) exp = 0;
    }

    bool is_zero() const { return num == 0; }

    Dyadic& operator+=(const Dyadic& o) {
        int e = exp > o.exp ? exp : o.exp;
        if (e - exp > 120 || e - o.exp > 120) throw std::overflow_error("dyadic exponent spread");
        num = (num << (e - exp)) + (o.num << (e - o.exp));
        exp = e;
        normalize();
        return *this;
    }
    friend Dyadic operator+(Dyadic a, const Dyadic& b) { return a += b; }

    // comparisons: cross-shift to a common exponent
    friend bool operator<(const Dyadic& a, const Dyadic& b) {
        int e = a.exp > b.exp ? a.exp : b.exp;
        return (a.num << (e - a.exp)) < (b.num << (e - b.exp));
    }
    friend bool operator<=(const Dyadic& a, const Dyadic& b) { return !(b < a); }
    friend bool operator==(const Dyadic& a, const Dyadic& b) { return !(a < b) && !(b < a); }
    friend bool operator>(const Dyadic& a, const Dyadic& b) { return b < a; }
    friend bool operator>=(const Dyadic& a, const Dyadic& b) { return b <= a; }

    // a * k for a small integer factor
    Dyadic times(uint64_t k) const {
        Dyadic r;
        r.num = num * k;
        r.exp = exp;
        r.normalize();
        return r;
    }

    // compare против rational p/q without division: this <=> p/q
    // returns -1, 0, +1
    int cmp_fraction(uint64_t p, uint64_t q) const {
        // num/2^exp vs p/q   <=>   num*q vs p*2^exp
        unsigned __int128 lhs = num * q;
        if (exp > 100) {
            // value is astronomically small; p/q positive => lhs tiny unless p==0
            if (p == 0) return num == 0 ? 0 : 1;
            return -1;
        }
        unsigned __int128 rhs = (unsigned __int128)p << exp;
        if (lhs < rhs) return -1;
        if (lhs > rhs) return 1;
        return 0;
    }

    double to_double() const {
        double v = 0;
        unsigned __int128 n = num;
        double scale = 1.0;
        while (n > 0) {
            v += (double)(uint64_t)(n & 0xffffffffffffffffULL) * scale;
            // 2^64
            scale *= 18446744073709551616.0;
            n >>= 64;
        }
        for (int i = 0; i < exp; ++i) v /= 2.0;
        return v;
    }

    std::string to_string() const;
};

// parallel_for honoring the LOCALSIM_THREADS cap; falls back to serial.
int thread_cap();
void parallel_for(int begin, int end, const std::function<void(int)>& body);

inline bool is_prime_u64(uint64_t x) {
    if (x < 2) return false;
    for (uint64_t d = 2; d * d <= x; ++d)
        if (x % d == 0) return false;
    return true;
}

inline uint64_t next_prime(uint64_t x) {
    while (!is_prime_u64(x)) ++x;
    return x;
}

// checked n^C for id ranges; throws if it would not fit in 63 bits
inline uint64_t pow_checked(uint64_t base, int e) {
    unsigned __int128 r = 1;
    for (int i = 0; i < e; ++i) {
        r *= base;
        if (r > ((unsigned __int128)1 << 62)) throw std::overflow_error("id range exceeds 63 bits");
    }
    return (uint64_t)r;
}

inline int ceil_log2(uint64_t x) {
    int b = 0;
    while (((uint64_t)1 << b) < x) ++b;
    return b;
}

}  // namespace localsim
