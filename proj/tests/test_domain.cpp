// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 tvrec Contributors

#include <doctest.h>

#include "tvrec/domain.hpp"

using namespace tvrec;

namespace {

Program make_program(ProgramId id, std::int64_t duration_s) {
    Program p;
    p.id = id;
    p.duration_s = duration_s;
    return p;
}

ViewEvent make_event(ProgramId program, std::int64_t watched_s) {
    ViewEvent ev;
    ev.user = 1;
    ev.program = program;
    ev.watched_seconds = watched_s;
    return ev;
}

}  // namespace

TEST_CASE("watch_fraction basics") {
    Program p = make_program(10, 3600);
    CHECK(watch_fraction(make_event(10, 1800), p) == doctest::Approx(0.5));
    CHECK(watch_fraction(make_event(10, 0), p) == 0.0);
    CHECK(watch_fraction(make_event(10, 5400), p) == 1.0);  // clamped
    CHECK(watch_fraction(make_event(10, 3600), p) == 1.0);
}

TEST_CASE("watch_fraction rejects mismatched program") {
    Program p = make_program(10, 3600);
    CHECK_THROWS_AS(watch_fraction(make_event(11, 100), p), std::invalid_argument);
}

TEST_CASE("preference_label strict thresholds") {
    PreferenceRule half = PreferenceRule::fraction_over(0.5);
    CHECK(preference_label(0.51, 0, half) == 1);
    CHECK(preference_label(0.50, 0, half) == 0);
    CHECK(preference_label(1.0, 0, half) == 1);
    CHECK(preference_label(0.0, 0, half) == 0);

    PreferenceRule ten = PreferenceRule::minutes_over(10);
    CHECK(preference_label(0.0, 601, ten) == 1);
    CHECK(preference_label(0.0, 600, ten) == 0);
    CHECK(preference_label(0.0, 599, ten) == 0);
}

TEST_CASE("preference_label is monotone in fraction and seconds") {
    PreferenceRule half = PreferenceRule::fraction_over(0.5);
    int prev = 0;
    for (int i = 0; i <= 100; ++i) {
        int label = preference_label(i / 100.0, 0, half);
        CHECK(label >= prev);
        prev = label;
    }
    PreferenceRule ten = PreferenceRule::minutes_over(10);
    prev = 0;
    for (std::int64_t s = 0; s <= 1200; s += 7) {
        int label = preference_label(0.0, s, ten);
        CHECK(label >= prev);
        prev = label;
    }
}

TEST_CASE("watch_fraction ignores channel") {
    Program p = make_program(10, 1000);
    ViewEvent a = make_event(10, 400);
    a.channel = 1;
    ViewEvent b = make_event(10, 400);
    b.channel = 99;
    CHECK(watch_fraction(a, p) == watch_fraction(b, p));
}

TEST_CASE("category round trip and rejection") {
    for (int i = 0; i < kNumCategories; ++i) {
        Category c = static_cast<Category>(i);
        CHECK(category_from_string(to_string(c)) == c);
    }
    CHECK_THROWS_AS(category_from_string("Music"), std::invalid_argument);
    Category out;
    CHECK_FALSE(try_category_from_string("music", out));
}
