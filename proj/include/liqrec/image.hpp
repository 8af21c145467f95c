#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace liqrec {

struct BinaryMask {
    int width = 0, height = 0;
    std::vector<std::uint8_t> values; // row-major, {0,1}

    BinaryMask() = default;
    BinaryMask(int w, int h) : width(w), height(h), values(static_cast<std::size_t>(w) * h, 0) {}

    std::uint8_t at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
    std::uint8_t& at(int x, int y) { return values[static_cast<std::size_t>(y) * width + x]; }

    std::size_t area() const {
        std::size_t n = 0;
        for (auto v : values) n += v;
        return n;
    }
    bool empty_mask() const { return area() == 0; }
};

struct SoftImage {
    int width = 0, height = 0;
    std::vector<double> values; // row-major, [0,1]

    SoftImage() = default;
    SoftImage(int w, int h) : width(w), height(h), values(static_cast<std::size_t>(w) * h, 0.0) {}

    double at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
    double& at(int x, int y) { return values[static_cast<std::size_t>(y) * width + x]; }

    BinaryMask binarize(double tau) const {
        BinaryMask m(width, height);
        for (std::size_t i = 0; i < values.size(); ++i)
            m.values[i] = values[i] >= tau ? 1 : 0;
        return m;
    }
};

} // namespace liqrec
