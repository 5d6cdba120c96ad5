#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace ccdc::gf256 {

// GF(2^8) with the 0x11d reduction polynomial. Tables are built once at
// startup; mul() resolves to one lookup in a 64 KiB product table.

std::uint8_t mul(std::uint8_t a, std::uint8_t b);
std::uint8_t inv(std::uint8_t a);  // a != 0

// Row of the product table for a fixed coefficient, for bulk byte work.
const std::uint8_t* mul_row(std::uint8_t c);

// dst[i] ^= c * src[i]
void mul_add(std::uint8_t* dst, const std::uint8_t* src, std::uint8_t c, std::size_t n);

// Dense square matrix over GF(2^8), row-major.
class Matrix {
public:
    Matrix() = default;
    explicit Matrix(std::size_t n) : n_(n), cells_(n * n, 0) {}

    std::size_t size() const { return n_; }
    std::uint8_t& at(std::size_t r, std::size_t c) { return cells_[r * n_ + c]; }
    std::uint8_t at(std::size_t r, std::size_t c) const { return cells_[r * n_ + c]; }
    const std::uint8_t* row(std::size_t r) const { return cells_.data() + r * n_; }

    // Gauss-Jordan inverse; nullopt when singular.
    std::optional<Matrix> inverse() const;

    // out = M * rhs where rhs is n rows of `width` bytes (rhs laid out
    // row-major, row r at rhs + r*width).
    void apply(const std::uint8_t* rhs, std::size_t width, std::uint8_t* out) const;

private:
    std::size_t n_ = 0;
    std::vector<std::uint8_t> cells_;
};

}  // namespace ccdc::gf256
