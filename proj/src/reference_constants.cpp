#include "probebench/report.hpp"

namespace probebench::report {

namespace {

using R = Reported;

// Transcribed from the published tables. Table 2 prints seven ImageNet RegNetY
// rows; RegNetY_128GF only appears with SWAG weights (Tables 4 and 6).
const std::vector<ReferenceEntry>& entries() {
  static const std::vector<ReferenceEntry> kEntries = {
      // Table 1: ResNets, ImageNet.
      {"ResNet-18", "imagenet", R{61.17}, R{0.65}, R{78.99}, R{0.21}, "Table 1"},
      {"ResNet-34", "imagenet", R{64.75}, R{1.07}, R{82.54}, R{1.57}, "Table 1"},
      {"ResNet-50", "imagenet", R{69.68}, R{0.26}, R{85.11}, R{0.09}, "Table 1"},
      {"ResNet-101", "imagenet", R{67.96}, R{0.64}, R{84.20}, R{0.43}, "Table 1"},
      {"ResNet-152", "imagenet", R{67.13}, R{0.51}, R{84.19}, R{1.36}, "Table 1"},
      // Table 2: RegNetYs, ImageNet.
      {"RegNetY_400MF", "imagenet", R{62.23}, R{0.33}, R{80.41}, R{0.27}, "Table 2"},
      {"RegNetY_800MF", "imagenet", R{67.49}, R{1.80}, R{82.77}, R{0.72}, "Table 2"},
      {"RegNetY_1_6GF", "imagenet", R{65.57}, R{1.70}, R{82.14}, R{0.87}, "Table 2"},
      {"RegNetY_3_2GF", "imagenet", R{67.39}, R{0.70}, R{84.61}, R{0.71}, "Table 2"},
      {"RegNetY_8GF", "imagenet", R{66.87}, R{4.09}, R{84.16}, R{1.05}, "Table 2"},
      {"RegNetY_16GF", "imagenet", R{64.64}, R{1.35}, R{82.68}, R{0.52}, "Table 2"},
      {"RegNetY_32GF", "imagenet", R{67.24}, R{0.78}, R{83.45}, R{1.19}, "Table 2"},
      // Table 3: ViTs, ImageNet.
      {"ViT-B-16", "imagenet", R{65.32}, R{1.21}, R{83.44}, R{0.86}, "Table 3"},
      {"ViT-B-32", "imagenet", R{57.79}, R{1.17}, R{80.85}, R{0.91}, "Table 3"},
      {"ViT-L-16", "imagenet", R{66.67}, R{2.22}, R{83.29}, R{0.74}, "Table 3"},
      {"ViT-L-32", "imagenet", R{59.71}, R{0.96}, R{82.53}, R{0.74}, "Table 3"},
      // Table 4: RegNetYs, SWAG.
      {"RegNetY_16GF", "swag", R{80.82}, R{1.31}, R{90.05}, R{0.70}, "Table 4"},
      {"RegNetY_32GF", "swag", R{83.02}, R{2.02}, R{93.08}, R{0.61}, "Table 4"},
      {"RegNetY_128GF", "swag", R{84.38}, R{0.64}, R{93.48}, R{1.01}, "Table 4"},
      // Table 5: ViTs, SWAG.
      {"ViT-B-16", "swag", R{74.85}, R{0.52}, R{87.10}, R{0.27}, "Table 5"},
      {"ViT-L-16", "swag", R{78.92}, R{2.42}, R{90.55}, R{2.38}, "Table 5"},
      {"ViT-H-14", "swag", R{82.06}, R{1.40}, R{93.10}, R{0.69}, "Table 5"},
      // Table 6: RegNetYs, SWAG then end-to-end ImageNet fine-tuning.
      {"RegNetY_16GF", "swag+imagenet-ft", R{83.07}, R{1.58}, R{91.93}, R{0.38}, "Table 6"},
      {"RegNetY_32GF", "swag+imagenet-ft", R{85.71}, R{1.40}, R{93.64}, R{0.79}, "Table 6"},
      {"RegNetY_128GF", "swag+imagenet-ft", R{87.38}, R{1.96}, R{94.48}, R{0.59}, "Table 6"},
      // Table 7: ViTs, SWAG then end-to-end ImageNet fine-tuning.
      {"ViT-B-16", "swag+imagenet-ft", R{77.80}, R{1.57}, R{88.25}, R{1.02}, "Table 7"},
      {"ViT-L-16", "swag+imagenet-ft", R{87.07}, R{1.14}, R{94.08}, R{0.75}, "Table 7"},
      {"ViT-H-14", "swag+imagenet-ft", R{90.13}, R{0.91}, R{95.21}, R{0.45}, "Table 7"},
      // Table 8: end-to-end debiasing methods on ResNet-50, and the linear probes.
      {"ERM", "imagenet", R{72.6, 1}, std::nullopt, R{97.3, 1}, std::nullopt, "Table 8"},
      {"LfF", "imagenet", R{78.0, 1}, std::nullopt, R{91.2, 1}, std::nullopt, "Table 8"},
      {"EIIL", "imagenet", R{78.7, 1}, std::nullopt, R{96.9, 1}, std::nullopt, "Table 8"},
      {"JTT", "imagenet", R{86.7, 1}, std::nullopt, R{93.3, 1}, std::nullopt, "Table 8"},
      {"SSA", "imagenet", R{89.0, 1}, R{0.55}, R{92.2, 1}, R{0.87}, "Table 8"},
      {"GroupDRO", "imagenet", R{89.2, 1}, R{0.18}, R{91.8, 1}, R{0.48}, "Table 8"},
      {"Ours-ResNet-50", "imagenet", R{69.7, 1}, R{0.26}, R{85.1, 1}, R{0.09}, "Table 8"},
      {"Ours-ViT-H-14", "swag+imagenet-ft", R{90.1, 1}, R{0.91}, R{95.2, 1}, R{0.45}, "Table 8"},
  };
  return kEntries;
}

}  // namespace

std::span<const ReferenceEntry> reference_entries() { return entries(); }

}  // namespace probebench::report
