#include "kpeaks/radial/io.hpp"

#include <json.hpp>

#include "kpeaks/core/format.hpp"

namespace kpeaks::radial {

void
write_profile(const RadialProfile& profile, const std::filesystem::path& stem)
{
    auto csv = open_output(stem.string() + ".csv");
    csv << "r,u,du,d2u\n";
    const auto& grid = profile.grid();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        csv << fmt17(grid[i]) << ',' << fmt17(profile.values()[i]) << ',' << fmt17(profile.derivs()[i]) << ','
            << fmt17(profile.seconds()[i]) << '\n';
    }
    nlohmann::json j;
    const auto& eq = profile.equation();
    j["lambda"] = eq.lambda;
    j["exponent"] = eq.exponent;
    j["diffusion"] = eq.diffusion;
    j["nodes"] = grid.size();
    j["r_max"] = grid.r_max();
    j["peak"] = profile.peak();
    j["tail"] = {{"amplitude", profile.tail().amplitude},
                 {"rate", profile.tail().rate},
                 {"r_match", profile.tail().r_match}};
    j["residual_sup"] = profile.residual_sup;
    j["match_radius"] = profile.match_radius;
    j["match_slope_mismatch"] = profile.match_slope_mismatch;
    auto out = open_output(stem.string() + ".json");
    out << j.dump(2) << '\n';
}

} // namespace kpeaks::radial
