#include "kpeaks/fields/field3d.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "kpeaks/core/error.hpp"
#include "kpeaks/core/format.hpp"

namespace kpeaks::fields {

Field3D::Field3D(const BoxSpec& box)
    : Field3D(box, std::vector<double>(static_cast<std::size_t>(box.n) * box.n * box.n, 0.0))
{
}

Field3D::Field3D(const BoxSpec& box, std::vector<double> values)
    : box_(box)
    , values_(std::move(values))
{
    require(box.n >= 3 && box.half_width > 0.0, "invalid box specification");
    require(values_.size() == static_cast<std::size_t>(box.n) * box.n * box.n, "field size does not match the box");
}

Vec3
Field3D::node(int i, int j, int k) const
{
    double h = box_.h();
    double L = box_.half_width;
    return {box_.center[0] - L + i * h, box_.center[1] - L + j * h, box_.center[2] - L + k * h};
}

Vec3
Field3D::node(std::size_t idx) const
{
    std::size_t n = static_cast<std::size_t>(box_.n);
    return node(static_cast<int>(idx % n), static_cast<int>((idx / n) % n), static_cast<int>(idx / (n * n)));
}

bool
Field3D::on_boundary(std::size_t idx) const
{
    std::size_t n = static_cast<std::size_t>(box_.n);
    std::size_t i = idx % n, j = (idx / n) % n, k = idx / (n * n);
    return i == 0 || j == 0 || k == 0 || i == n - 1 || j == n - 1 || k == n - 1;
}

double
Field3D::max_abs() const
{
    double m = 0.0;
    for (double v : values_) {
        m = std::max(m, std::abs(v));
    }
    return m;
}

double
Field3D::boundary_max_abs() const
{
    double m = 0.0;
    for (std::size_t idx = 0; idx < values_.size(); ++idx) {
        if (on_boundary(idx)) {
            m = std::max(m, std::abs(values_[idx]));
        }
    }
    return m;
}

double
Field3D::interpolate(const Vec3& x) const
{
    double h = box_.h();
    int n = box_.n;
    double f[3];
    int lo[3];
    for (int d = 0; d < 3; ++d) {
        double s = (x[d] - (box_.center[d] - box_.half_width)) / h;
        if (s < 0.0 || s > n - 1) {
            return 0.0;
        }
        lo[d] = std::min(static_cast<int>(s), n - 2);
        f[d] = s - lo[d];
    }
    double acc = 0.0;
    for (int c = 0; c < 8; ++c) {
        int di = c & 1, dj = (c >> 1) & 1, dk = (c >> 2) & 1;
        double w = (di ? f[0] : 1.0 - f[0]) * (dj ? f[1] : 1.0 - f[1]) * (dk ? f[2] : 1.0 - f[2]);
        acc += w * values_[index(lo[0] + di, lo[1] + dj, lo[2] + dk)];
    }
    return acc;
}

void
Field3D::write(const std::filesystem::path& stem) const
{
    auto bin_path = std::filesystem::path(stem.string() + ".bin");
    if (bin_path.has_parent_path()) {
        std::filesystem::create_directories(bin_path.parent_path());
    }
    std::ofstream bin(bin_path, std::ios::binary);
    if (!bin) {
        throw Error(ErrorCode::InvalidArgument, "cannot open " + bin_path.string());
    }
    bin.write(reinterpret_cast<const char*>(values_.data()), static_cast<std::streamsize>(values_.size() * sizeof(double)));
    nlohmann::json j;
    j["L"] = box_.half_width;
    j["n"] = box_.n;
    j["h"] = box_.h();
    j["center"] = box_.center;
    j["ordering"] = "x-fastest";
    j["dtype"] = "float64-le";
    j["data"] = bin_path.filename().string();
    auto out = open_output(stem.string() + ".json");
    out << j.dump(2) << '\n';
}

Field3D
Field3D::read(const std::filesystem::path& stem)
{
    std::ifstream hdr(stem.string() + ".json");
    if (!hdr) {
        throw Error(ErrorCode::InvalidArgument, "cannot open " + stem.string() + ".json");
    }
    nlohmann::json j = nlohmann::json::parse(hdr);
    BoxSpec box;
    box.half_width = j.at("L").get<double>();
    box.n = j.at("n").get<int>();
    box.center = j.at("center").get<Vec3>();
    std::vector<double> values(static_cast<std::size_t>(box.n) * box.n * box.n);
    std::ifstream bin(stem.string() + ".bin", std::ios::binary);
    bin.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(values.size() * sizeof(double)));
    if (!bin) {
        throw Error(ErrorCode::InvalidArgument, "truncated field data for " + stem.string());
    }
    return Field3D(box, std::move(values));
}

} // namespace kpeaks::fields
