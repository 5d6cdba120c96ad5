#include "ccdc/gf256.hpp"

#include <array>

namespace ccdc::gf256 {

namespace {

struct Tables {
    std::array<std::uint8_t, 512> exp{};
    std::array<std::uint8_t, 256> log{};
    std::array<std::uint8_t, 256> inv{};
    std::array<std::uint8_t, 256 * 256> prod{};

    Tables() {
        int poly = 0x11d;
        int v = 1;
        for (int i = 0; i < 255; ++i) {
            exp[i] = (std::uint8_t)v;
            log[v] = (std::uint8_t)i;
            v <<= 1;
            if (v & 0x100) v ^= poly;
        }
        for (int i = 255; i < 512; ++i) exp[i] = exp[i - 255];
        inv[0] = 0;  // never queried
        for (int a = 1; a < 256; ++a) inv[a] = exp[(255 - log[a]) % 255];
        for (int a = 1; a < 256; ++a)
            for (int b = 1; b < 256; ++b)
                prod[a * 256 + b] = exp[log[a] + log[b]];
    }
};

const Tables& tables() {
    static const Tables t;
    return t;
}

}  // namespace

std::uint8_t mul(std::uint8_t a, std::uint8_t b) { return tables().prod[a * 256 + b]; }

std::uint8_t inv(std::uint8_t a) { return tables().inv[a]; }

const std::uint8_t* mul_row(std::uint8_t c) { return tables().prod.data() + c * 256; }

void mul_add(std::uint8_t* dst, const std::uint8_t* src, std::uint8_t c, std::size_t n) {
    if (c == 0) return;
    if (c == 1) {
        for (std::size_t i = 0; i < n; ++i) dst[i] ^= src[i];
        return;
    }
    const std::uint8_t* row = mul_row(c);
    for (std::size_t i = 0; i < n; ++i) dst[i] ^= row[src[i]];
}

std::optional<Matrix> Matrix::inverse() const {
    std::size_t n = n_;
    Matrix work = *this;
    Matrix out(n);
    for (std::size_t i = 0; i < n; ++i) out.at(i, i) = 1;

    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        while (pivot < n && work.at(pivot, col) == 0) ++pivot;
        if (pivot == n) return std::nullopt;
        if (pivot != col) {
            for (std::size_t j = 0; j < n; ++j) {
                std::swap(work.at(col, j), work.at(pivot, j));
                std::swap(out.at(col, j), out.at(pivot, j));
            }
        }
        std::uint8_t scale = inv(work.at(col, col));
        if (scale != 1) {
            const std::uint8_t* row = mul_row(scale);
            for (std::size_t j = 0; j < n; ++j) {
                work.at(col, j) = row[work.at(col, j)];
                out.at(col, j) = row[out.at(col, j)];
            }
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            std::uint8_t f = work.at(r, col);
            if (f == 0) continue;
            const std::uint8_t* row = mul_row(f);
            for (std::size_t j = 0; j < n; ++j) {
                work.at(r, j) ^= row[work.at(col, j)];
                out.at(r, j) ^= row[out.at(col, j)];
            }
        }
    }
    return out;
}

void Matrix::apply(const std::uint8_t* rhs, std::size_t width, std::uint8_t* out) const {
    for (std::size_t r = 0; r < n_; ++r) {
        std::uint8_t* dst = out + r * width;
        for (std::size_t i = 0; i < width; ++i) dst[i] = 0;
        const std::uint8_t* coeffs = row(r);
        for (std::size_t c = 0; c < n_; ++c)
            mul_add(dst, rhs + c * width, coeffs[c], width);
    }
}

}  // namespace ccdc::gf256
