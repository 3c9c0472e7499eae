#include "pgpu/common.hpp"

#include <string>

namespace pgpu {

void require_both_classes(const Labels& labels, const char* what) {
    bool pos = false, neg = false;
    for (int v : labels) {
        pos |= v == 1;
        neg |= v == -1;
    }
    if (!pos || !neg) throw DegenerateInput(std::string(what) + ": degenerate training set");
}

void require_binary(const Labels& labels, const char* what) {
    for (int v : labels)
        if (v != 1 && v != -1)
            throw InvalidInput(std::string(what) + ": label " + std::to_string(v) +
                               " is not +1 or -1");
}

std::uint64_t derive_seed(std::initializer_list<std::uint64_t> parts) {
    std::uint64_t h = 0x9e3779b97f4a7c15ULL;
    for (auto p : parts) {
        std::uint64_t z = h ^ (p + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        h = z ^ (z >> 31);
    }
    return h;
}

Matrix select_rows(const Matrix& X, const IndexList& rows) {
    Matrix out(static_cast<Eigen::Index>(rows.size()), X.cols());
    for (std::size_t r = 0; r < rows.size(); ++r)
        out.row(static_cast<Eigen::Index>(r)) = X.row(static_cast<Eigen::Index>(rows[r]));
    return out;
}

}  // namespace pgpu
