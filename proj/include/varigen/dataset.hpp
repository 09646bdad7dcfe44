#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "varigen/image.hpp"
#include "varigen/rng.hpp"

namespace varigen::data {

struct TestEntry {
    std::filesystem::path path;
    std::string defect_type;  // "good" for normal entries
    bool anomalous = false;
};

/// Index over the MVTecAD-style folder convention:
///   <root>/<category>/train/good/*.png
///   <root>/<category>/test/<type>/*.png
///   <root>/<category>/ground_truth/<type>/<stem>_mask.png
struct DatasetIndex {
    std::string category;
    std::filesystem::path root;  // <root>/<category>
    std::vector<std::filesystem::path> train_good;
    std::vector<TestEntry> test;
    std::map<std::string, std::filesystem::path> masks;  // test path string -> mask path
};

DatasetIndex load_dataset(const std::filesystem::path& root, const std::string& category);

enum class ScenarioKind { OneShot, FewShot, FullShot };

ScenarioKind parse_scenario(const std::string& name);
const char* scenario_name(ScenarioKind kind);

struct Scenario {
    ScenarioKind kind = ScenarioKind::OneShot;

    int shot_count() const {
        switch (kind) {
            case ScenarioKind::OneShot: return 1;
            case ScenarioKind::FewShot: return 5;
            case ScenarioKind::FullShot: return -1;  // all
        }
        return -1;
    }
};

/// Seeded selection of training originals: 1 / 5 / all good images. The
/// chosen subset is returned sorted. Throws InsufficientImages when fewer
/// images are available than the scenario requires.
std::vector<std::filesystem::path> select_scenario(const DatasetIndex& index,
                                                   const Scenario& scenario, Rng& rng);

/// Ground-truth mask as a single channel of exact {0,1} values (threshold 0.5).
ImageTensor read_mask(const std::filesystem::path& path);

}  // namespace varigen::data
