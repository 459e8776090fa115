#pragma once

#include <string>
#include <vector>

#include "fdct/config.hpp"

namespace fdct {

struct AblationRow {
    std::string axis;
    std::string name;
    double psnr = 0.0;
    double ssim = 0.0;
    double mse = 0.0;
};

// Axes: "modules" (ffd / ffd_fld / full), "attention" (ga / ssla_ga),
// "fusion" (ldf / l_plus_h). Each row trains its own short configuration on
// the config's ablation budget and reports mean metrics over held-out
// phantoms reconstructed at the training-pair geometry.
std::vector<AblationRow> run_ablation(const RunConfig& cfg, const std::string& axis);

// One variant configuration by row name; exposed for path-equality tests.
RunConfig ablation_variant(const RunConfig& cfg, const std::string& axis,
                           const std::string& row_name);

void write_ablation_csv(const std::vector<AblationRow>& rows, const std::string& path);

}  // namespace fdct
