#include "mbci/montage.hpp"

#include "mbci/error.hpp"

namespace mbci {

namespace {

struct Site {
    const char* label;
    double x;
    double y;
};

constexpr Site kSites[] = {
    {"Fp1", -0.25, 0.77},  {"AF3", -0.24, 0.57},  {"F7", -0.65, 0.47},  {"F3", -0.33, 0.42},
    {"FC1", -0.20, 0.20},  {"FC5", -0.60, 0.20},  {"T7", -0.80, 0.00},  {"C3", -0.40, 0.00},
    {"CP1", -0.20, -0.20}, {"CP5", -0.60, -0.20}, {"P7", -0.65, -0.47}, {"P3", -0.33, -0.42},
    {"Pz", 0.00, -0.40},   {"PO3", -0.24, -0.57}, {"O1", -0.25, -0.77}, {"Oz", 0.00, -0.80},
    {"O2", 0.25, -0.77},   {"PO4", 0.24, -0.57},  {"P4", 0.33, -0.42},  {"P8", 0.65, -0.47},
    {"CP6", 0.60, -0.20},  {"CP2", 0.20, -0.20},  {"C4", 0.40, 0.00},   {"T8", 0.80, 0.00},
    {"FC6", 0.60, 0.20},   {"FC2", 0.20, 0.20},   {"F4", 0.33, 0.42},   {"F8", 0.65, 0.47},
    {"AF4", 0.24, 0.57},   {"Fp2", 0.25, 0.77},   {"Fz", 0.00, 0.40},   {"Cz", 0.00, 0.00},
};

}  // namespace

std::vector<ChannelInfo> eeg32_montage()
{
    std::vector<ChannelInfo> out;
    out.reserve(std::size(kSites));
    for (const auto& s : kSites)
        out.push_back({s.label, ChannelKind::EEG, ScalpPosition{s.x, s.y}});
    return out;
}

std::vector<ChannelInfo> full_montage()
{
    auto out = eeg32_montage();
    for (auto* label : kEmgLabels)
        out.push_back({label, ChannelKind::EMG, std::nullopt});
    for (auto* label : kEogLabels)
        out.push_back({label, ChannelKind::EOG, std::nullopt});
    return out;
}

std::vector<std::string> laplacian_neighbors(const std::string& center)
{
    if (center == "C3")
        return {"FC1", "FC5", "CP1", "CP5"};
    if (center == "C4")
        return {"FC2", "FC6", "CP2", "CP6"};
    if (center == "Cz")
        return {"FC1", "FC2", "CP1", "CP2"};
    throw Error(Errc::UnknownChannel, "no default Laplacian neighbourhood for '" + center + "'");
}

}  // namespace mbci
