#include "varigen/dataset.hpp"

#include <algorithm>

#include "varigen/errors.hpp"
#include "varigen/png_io.hpp"

namespace varigen::data {

namespace {

bool is_png(const std::filesystem::path& p) {
    const auto ext = p.extension().string();
    return ext == ".png" || ext == ".PNG";
}

std::vector<std::filesystem::path> sorted_pngs(const std::filesystem::path& dir) {
    std::vector<std::filesystem::path> out;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.is_regular_file() && is_png(entry.path())) out.push_back(entry.path());
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

ScenarioKind parse_scenario(const std::string& name) {
    if (name == "one_shot") return ScenarioKind::OneShot;
    if (name == "few_shot") return ScenarioKind::FewShot;
    if (name == "full_shot") return ScenarioKind::FullShot;
    raise(ErrorCode::ConfigError, "unknown scenario: " + name);
}

const char* scenario_name(ScenarioKind kind) {
    switch (kind) {
        case ScenarioKind::OneShot: return "one_shot";
        case ScenarioKind::FewShot: return "few_shot";
        case ScenarioKind::FullShot: return "full_shot";
    }
    return "?";
}

DatasetIndex load_dataset(const std::filesystem::path& root, const std::string& category) {
    DatasetIndex index;
    index.category = category;
    index.root = root / category;

    const auto train_good = index.root / "train" / "good";
    if (!std::filesystem::is_directory(train_good)) {
        raise(ErrorCode::LayoutViolation,
              "missing train/good directory under " + index.root.string());
    }
    index.train_good = sorted_pngs(train_good);
    if (index.train_good.empty()) {
        raise(ErrorCode::LayoutViolation, "train/good holds no PNG images: " + train_good.string());
    }

    const auto test_dir = index.root / "test";
    if (std::filesystem::is_directory(test_dir)) {
        std::vector<std::filesystem::path> type_dirs;
        for (const auto& entry : std::filesystem::directory_iterator(test_dir)) {
            if (entry.is_directory()) type_dirs.push_back(entry.path());
        }
        std::sort(type_dirs.begin(), type_dirs.end());
        for (const auto& type_dir : type_dirs) {
            const std::string type = type_dir.filename().string();
            const bool anomalous = type != "good";
            for (const auto& img : sorted_pngs(type_dir)) {
                index.test.push_back(TestEntry{img, type, anomalous});
                if (anomalous) {
                    auto mask = index.root / "ground_truth" / type /
                                (img.stem().string() + "_mask.png");
                    if (!std::filesystem::is_regular_file(mask)) {
                        raise(ErrorCode::MissingMask,
                              "anomalous test image without ground-truth mask: " + img.string());
                    }
                    index.masks[img.string()] = mask;
                }
            }
        }
    }
    return index;
}

std::vector<std::filesystem::path> select_scenario(const DatasetIndex& index,
                                                   const Scenario& scenario, Rng& rng) {
    if (index.train_good.empty()) raise(ErrorCode::EmptyTrainingSet, "no training images indexed");
    const int available = static_cast<int>(index.train_good.size());
    const int want = scenario.shot_count();
    if (want < 0) return index.train_good;  // full shot, sorted order
    if (want > available) {
        raise(ErrorCode::InsufficientImages,
              std::string(scenario_name(scenario.kind)) + " needs " + std::to_string(want) +
                  " good images, only " + std::to_string(available) + " available");
    }
    // Partial Fisher-Yates over an index array; the chosen subset is sorted.
    std::vector<int> order(available);
    for (int i = 0; i < available; ++i) order[i] = i;
    for (int i = 0; i < want; ++i) {
        const int j = static_cast<int>(rng.uniform_int(i, available - 1));
        std::swap(order[i], order[j]);
    }
    std::vector<std::filesystem::path> chosen;
    chosen.reserve(want);
    for (int i = 0; i < want; ++i) chosen.push_back(index.train_good[order[i]]);
    std::sort(chosen.begin(), chosen.end());
    return chosen;
}

ImageTensor read_mask(const std::filesystem::path& path) {
    ImageTensor raw = read_image(path);
    ImageTensor gray = to_grayscale(raw);
    for (double& v : gray.data) v = v >= 0.5 ? 1.0 : 0.0;
    return gray;
}

}  // namespace varigen::data
