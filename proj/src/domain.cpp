// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 tvrec Contributors

#include "tvrec/domain.hpp"

#include <algorithm>

namespace tvrec {

namespace {
constexpr const char* kCategoryNames[kNumCategories] = {
    "News", "TVSeries", "Entertainment", "Kids", "Documentaries", "Sports", "Movies", "Adults",
};
}

const char* to_string(Category c) { return kCategoryNames[static_cast<int>(c)]; }

bool try_category_from_string(std::string_view s, Category& out) {
    for (int i = 0; i < kNumCategories; ++i) {
        if (s == kCategoryNames[i]) {
            out = static_cast<Category>(i);
            return true;
        }
    }
    return false;
}

Category category_from_string(std::string_view s) {
    Category c;
    if (!try_category_from_string(s, c)) {
        throw std::invalid_argument("unknown category: " + std::string(s));
    }
    return c;
}

double watch_fraction(const ViewEvent& event, const Program& program) {
    if (event.program != program.id) {
        throw std::invalid_argument("view event references program " +
                                    std::to_string(event.program) + ", not " +
                                    std::to_string(program.id));
    }
    double fraction = static_cast<double>(event.watched_seconds) /
                      static_cast<double>(program.duration_s);
    return std::min(1.0, fraction);
}

int preference_label(double fraction, std::int64_t watched_seconds, const PreferenceRule& rule) {
    switch (rule.kind) {
        case PreferenceRule::Kind::FractionOver:
            return fraction > rule.threshold ? 1 : 0;
        case PreferenceRule::Kind::MinutesOver:
            return static_cast<double>(watched_seconds) > rule.threshold * 60.0 ? 1 : 0;
    }
    return 0;
}

}  // namespace tvrec
