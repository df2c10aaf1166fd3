#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace deeplight {

// ---------------------------------------------------------------------------
// Errors. Everything that is a caller bug or broken input throws; parse
// failures on snippets are the one expected failure mode and travel as a
// value (see ParseResult in token.hpp).
// ---------------------------------------------------------------------------

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct VocabularyOverflow : Error { using Error::Error; };
struct UnknownTokenType : Error { using Error::Error; };
struct VocabularyMismatch : Error { using Error::Error; };
struct FormatError : Error { using Error::Error; };
struct GenerationExhausted : Error { using Error::Error; };
struct CorpusTooSmall : Error { using Error::Error; };
struct EmptySource : Error { using Error::Error; };
struct EmptyEvalSet : Error { using Error::Error; };
struct InvalidLabel : Error { using Error::Error; };
struct IdOutOfRange : Error { using Error::Error; };
struct LabelOutOfRange : Error { using Error::Error; };
struct ShapeMismatch : Error { using Error::Error; };

// ---------------------------------------------------------------------------
// Rng: mt19937_64 plus hand-rolled draw helpers. The standard distributions
// are not pinned down by the standard, and every dataset and model in this
// project must be reproducible byte-for-byte from its seeds, so all draws go
// through these helpers.
// ---------------------------------------------------------------------------

class Rng {
  public:
    explicit Rng(uint64_t seed) : eng_(seed) {}

    uint64_t next_u64() { return eng_(); }

    // unbiased draw in [0, n) by rejection
    uint64_t below(uint64_t n) {
        if (n == 0) throw Error("Rng::below(0)");
        const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        uint64_t v;
        do {
            v = eng_();
        } while (v >= limit);
        return v % n;
    }

    int range(int lo, int hi) {  // inclusive bounds
        return lo + static_cast<int>(below(static_cast<uint64_t>(hi - lo + 1)));
    }

    // uniform in [0, 1) with 53 bits
    double real() { return static_cast<double>(eng_() >> 11) * (1.0 / 9007199254740992.0); }

    bool chance(double p) { return real() < p; }

    // Box-Muller; one value per call, no cached spare (keeps replay trivial)
    double normal(double mean, double stddev) {
        double u1 = real();
        while (u1 <= 0.0) u1 = real();
        const double u2 = real();
        const double r = std::sqrt(-2.0 * std::log(u1));
        return mean + stddev * r * std::cos(6.283185307179586 * u2);
    }

    template <class T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            const size_t j = static_cast<size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    // weighted pick, weights >= 0, at least one positive
    int pick_weighted(const std::vector<double>& w) {
        double total = 0.0;
        for (double x : w) total += x;
        double r = real() * total;
        for (size_t i = 0; i < w.size(); ++i) {
            r -= w[i];
            if (r < 0.0) return static_cast<int>(i);
        }
        return static_cast<int>(w.size()) - 1;
    }

    // stream splitting for independent substreams
    static uint64_t mix(uint64_t a, uint64_t b) {
        uint64_t x = a + 0x9e3779b97f4a7c15ULL * (b + 1);
        x ^= x >> 30;
        x *= 0xbf58476d1ce4e5b9ULL;
        x ^= x >> 27;
        x *= 0x94d049bb133111ebULL;
        x ^= x >> 31;
        return x;
    }

  private:
    std::mt19937_64 eng_;
};

// ---------------------------------------------------------------------------
// Misc small helpers
// ---------------------------------------------------------------------------

std::array<uint8_t, 32> sha256_bytes(const void* data, size_t len);
std::string hex_string(const uint8_t* data, size_t len);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

// FNV-1a over an arbitrary byte view, used for corpus dedup keys
uint64_t fnv1a(const void* data, size_t len, uint64_t h = 0xcbf29ce484222325ULL);

}  // namespace deeplight
