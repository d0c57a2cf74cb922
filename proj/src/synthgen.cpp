// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 tvrec Contributors

#include "tvrec/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "tvrec/rng.hpp"
#include "tvrec/time_utils.hpp"

namespace tvrec {

namespace {

// 2026-01-05 is a Monday; generation weeks align with the evaluation clock.
constexpr Timestamp kScheduleStart = 1767571200;
constexpr std::int64_t kSlotSeconds = 5400;  // 90-minute grid
constexpr int kSlotsPerDay = 16;
constexpr int kSlotsPerWeek = 7 * kSlotsPerDay;
constexpr ChannelId kHdChannelOffset = 100;

const char* const kCategoryWords[8][10] = {
    {"headline", "report", "world", "nation", "debate", "election", "economy", "press", "briefing", "analysis"},
    {"shadow", "legacy", "harbor", "crown", "secrets", "family", "detective", "island", "night", "fortune"},
    {"show", "stars", "laugh", "games", "talent", "stage", "party", "gold", "prime", "circus"},
    {"adventure", "magic", "rainbow", "puppy", "dragon", "castle", "tiny", "friends", "song", "playtime"},
    {"wild", "planet", "history", "ocean", "ancient", "frontier", "science", "journey", "hidden", "giants"},
    {"match", "league", "derby", "champions", "arena", "goal", "race", "tournament", "final", "classic"},
    {"midnight", "storm", "return", "city", "fire", "promise", "silent", "broken", "golden", "runaway"},
    {"late", "velvet", "scarlet", "noir", "masque", "ember", "mirage", "satin", "whisper", "allure"},
};

const char* const kSubcategorySuffix[4] = {"one", "two", "three", "four"};

const char* const kNameSyllables[] = {"al", "ber", "cas", "dor", "el",  "fen", "gar", "hol",
                                      "im", "jas", "kel", "lun", "mor", "nev", "or",  "pel",
                                      "qui", "ros", "sel", "tor", "ul",  "ver", "wil", "yor"};

std::string synth_word(std::uint64_t n) {
    std::string w;
    do {
        w += kNameSyllables[n % 24];
        n /= 24;
    } while (n > 0);
    return w;
}

std::string person_name(std::uint64_t id) {
    std::string first = synth_word(id * 2 + 1);
    std::string last = synth_word(id * 3 + 7);
    first[0] = static_cast<char>(first[0] - 'a' + 'A');
    last[0] = static_cast<char>(last[0] - 'a' + 'A');
    return first + " " + last;
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"";  // doubled below
        out += c;
    }
    out += "\"";
    return out;
}

std::string join(const std::vector<std::string>& parts, char sep) {
    std::string out;
    for (size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

struct SynthProgram {
    ProgramId id = 0;
    ChannelId home_channel = 0;
    std::string title;
    std::string description;
    std::vector<std::string> actors;
    std::vector<std::string> directors;
    int category = 0;
    std::string subcategory;
    bool is_series = false;
    int episode_count = 0;
    double quality = 0.5;   // drives global popularity
    ProgramId twin_id = 0;  // simulcast HD twin, 0 if none
    int day = 0, slot = 0;  // weekly grid home
    int week = -1;          // one-shots: the week they air
};

struct SynthAiring {
    ProgramId program;
    ChannelId channel;
    Timestamp start;
    const SynthProgram* meta;
};

struct UserProfile {
    UserId id = 0;
    int archetype = 0;
    ChannelId primary_channel = 0;
    ChannelId secondary_channel = 0;
    DayPart habit = DayPart::Evening;
    int sessions_per_week = 7;
    std::array<double, 8> affinity{};
    std::vector<ProgramId> routine;  // sorted series ids watched near-weekly
};

int pick_weighted(SplitMix64& rng, const std::vector<double>& weights) {
    double total = 0;
    for (double w : weights) total += w;
    double x = rng.next_double() * total;
    for (size_t i = 0; i < weights.size(); ++i) {
        x -= weights[i];
        if (x <= 0) return static_cast<int>(i);
    }
    return static_cast<int>(weights.size()) - 1;
}

int daypart_of_slot(int slot) {
    if (slot < 4) return static_cast<int>(DayPart::Night);
    if (slot < 8) return static_cast<int>(DayPart::Morning);
    if (slot < 12) return static_cast<int>(DayPart::Afternoon);
    return static_cast<int>(DayPart::Evening);
}

}  // namespace

void SynthParams::validate() const {
    if (n_users < 1 || n_channels < 1 || programs_per_week < 1 || n_weeks < 1) {
        throw std::invalid_argument("synth: all counts must be >= 1");
    }
    auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
    if (!in_unit(channel_loyalty) || !in_unit(series_repeat_prob) || !in_unit(daypart_regularity) ||
        !in_unit(catchup_share)) {
        throw std::invalid_argument("synth: probabilities must be in [0,1]");
    }
    if (category_affinity_concentration <= 0) {
        throw std::invalid_argument("synth: category_affinity_concentration must be > 0");
    }
    int per_channel = std::max(1, programs_per_week * n_weeks / n_channels);
    if (per_channel > kSlotsPerWeek) {
        throw std::invalid_argument("synth: programs do not fit the weekly schedule");
    }
}

SynthOutput synth_generate(const SynthParams& params, const std::string& out_dir) {
    params.validate();
    std::filesystem::create_directories(out_dir);

    const std::uint64_t seed = params.seed;
    std::array<double, 8> cat_weights = params.category_weights;
    {
        double total = 0;
        for (double w : cat_weights) total += w;
        if (total <= 0) throw std::invalid_argument("synth: category weights must sum > 0");
        for (double& w : cat_weights) w /= total;
    }

    // --- channels and programs ----------------------------------------------
    const int per_channel = std::max(1, params.programs_per_week * params.n_weeks / params.n_channels);
    const int n_series = std::max(1, (per_channel * 3) / 5);
    const int n_oneshots = std::max(0, per_channel - n_series);

    std::vector<int> channel_main(static_cast<size_t>(params.n_channels));
    std::vector<int> channel_alt(static_cast<size_t>(params.n_channels));
    {
        SplitMix64 rng(mix_seed(seed, 0xC4A77E1));
        for (int c = 0; c < params.n_channels; ++c) {
            std::vector<double> w(cat_weights.begin(), cat_weights.end());
            channel_main[static_cast<size_t>(c)] = pick_weighted(rng, w);
            w[static_cast<size_t>(channel_main[static_cast<size_t>(c)])] = 0;
            channel_alt[static_cast<size_t>(c)] = pick_weighted(rng, w);
        }
    }

    std::vector<SynthProgram> programs;
    ProgramId next_id = 1;

    auto make_program = [&](ChannelId channel, int cat, bool is_series, SplitMix64& rng) {
        SynthProgram p;
        p.id = next_id++;
        p.home_channel = channel;
        p.category = cat;
        p.subcategory = std::string(to_string(static_cast<Category>(cat))) + "-" +
                        kSubcategorySuffix[rng.next_below(4)];
        p.is_series = is_series;
        p.episode_count = is_series ? params.n_weeks : 0;
        p.quality = 0.15 + 0.85 / (1.0 + 0.25 * static_cast<double>(rng.next_below(24)));
        const char* const* words = kCategoryWords[cat];
        p.title = std::string(words[rng.next_below(10)]) + " " + words[rng.next_below(10)] + " " +
                  synth_word(0x5EED + static_cast<std::uint64_t>(p.id));
        std::string desc;
        for (int w = 0; w < 10; ++w) {
            if (w) desc += " ";
            desc += w % 3 == 2 ? "the" : words[rng.next_below(10)];
        }
        p.description = desc + " " + p.subcategory;
        // Actors pool shared within a (category, bucket) so same-taste
        // programs share cast vocabulary.
        std::uint64_t pool_base = static_cast<std::uint64_t>(cat) * 37 + rng.next_below(5);
        int n_actors = 2 + static_cast<int>(rng.next_below(3));
        for (int a = 0; a < n_actors; ++a) {
            p.actors.push_back(person_name(pool_base * 12 + rng.next_below(12)));
        }
        p.directors.push_back(person_name(900 + pool_base * 4 + rng.next_below(4)));
        return p;
    };

    for (int c = 0; c < params.n_channels; ++c) {
        ChannelId channel = c + 1;
        SplitMix64 rng(mix_seed(seed, 0x5C4ED, static_cast<std::uint64_t>(c)));

        std::vector<int> slots(kSlotsPerWeek);
        for (int s = 0; s < kSlotsPerWeek; ++s) slots[static_cast<size_t>(s)] = s;
        for (size_t i = slots.size(); i > 1; --i) {
            std::swap(slots[i - 1], slots[rng.next_below(i)]);
        }

        for (int s = 0; s < n_series; ++s) {
            int cat = rng.next_double() < 0.7 ? channel_main[static_cast<size_t>(c)]
                                              : channel_alt[static_cast<size_t>(c)];
            SynthProgram p = make_program(channel, cat, true, rng);
            int weekly = slots[static_cast<size_t>(s)];
            p.day = weekly / kSlotsPerDay;
            p.slot = weekly % kSlotsPerDay;
            programs.push_back(std::move(p));
        }
        int cursor = n_series;
        for (int w = 0; w < params.n_weeks; ++w) {
            int count = n_oneshots / params.n_weeks + ((w < n_oneshots % params.n_weeks) ? 1 : 0);
            for (int o = 0; o < count && cursor < kSlotsPerWeek; ++o, ++cursor) {
                int cat = rng.next_double() < 0.6 ? channel_main[static_cast<size_t>(c)]
                                                  : static_cast<int>(rng.next_below(8));
                SynthProgram p = make_program(channel, cat, false, rng);
                int weekly = slots[static_cast<size_t>(cursor)];
                p.day = weekly / kSlotsPerDay;
                p.slot = weekly % kSlotsPerDay;
                p.week = w;
                programs.push_back(std::move(p));
            }
        }
    }

    const size_t base_program_count = programs.size();

    // Simulcast HD twins for 5% of the programs.
    {
        SplitMix64 rng(mix_seed(seed, 0x7711));
        for (size_t i = 0; i < base_program_count; ++i) {
            if (rng.next_below(20) != 0) continue;
            SynthProgram twin = programs[i];
            twin.id = next_id++;
            twin.twin_id = 0;
            twin.home_channel = programs[i].home_channel + kHdChannelOffset;
            programs[i].twin_id = twin.id;
            programs.push_back(std::move(twin));
        }
    }

    std::map<ProgramId, const SynthProgram*> by_id;
    for (const SynthProgram& p : programs) by_id[p.id] = &p;

    // --- airings --------------------------------------------------------------
    auto slot_time = [&](int week, int day, int slot) {
        return kScheduleStart + static_cast<Timestamp>(week) * kSecondsPerWeek +
               static_cast<Timestamp>(day) * kSecondsPerDay +
               static_cast<Timestamp>(slot) * kSlotSeconds;
    };

    std::map<std::pair<ChannelId, int>, const SynthProgram*> slot_owner;
    std::map<ChannelId, std::vector<const SynthProgram*>> series_of_channel;
    for (size_t i = 0; i < base_program_count; ++i) {
        const SynthProgram& p = programs[i];
        slot_owner[{p.home_channel, p.day * kSlotsPerDay + p.slot}] = &p;
        if (p.is_series) series_of_channel[p.home_channel].push_back(&p);
    }

    std::vector<SynthAiring> airings;
    for (int c = 0; c < params.n_channels; ++c) {
        ChannelId channel = c + 1;
        SplitMix64 rng(mix_seed(seed, 0xA1F176, static_cast<std::uint64_t>(c)));
        const auto& own_series = series_of_channel[channel];
        for (int w = 0; w < params.n_weeks; ++w) {
            for (int weekly = 0; weekly < kSlotsPerWeek; ++weekly) {
                const SynthProgram* scheduled = nullptr;
                auto it = slot_owner.find({channel, weekly});
                if (it != slot_owner.end()) {
                    scheduled = it->second;
                    if (!scheduled->is_series && scheduled->week != w) scheduled = nullptr;
                }
                if (!scheduled) {
                    if (own_series.empty()) continue;
                    scheduled = own_series[rng.next_below(own_series.size())];  // rerun filler
                }
                Timestamp start = slot_time(w, weekly / kSlotsPerDay, weekly % kSlotsPerDay);
                airings.push_back({scheduled->id, channel, start, scheduled});
                if (scheduled->twin_id != 0) {
                    airings.push_back({scheduled->twin_id, channel + kHdChannelOffset, start,
                                       by_id.at(scheduled->twin_id)});
                }
            }
        }
    }
    std::sort(airings.begin(), airings.end(), [](const SynthAiring& a, const SynthAiring& b) {
        if (a.channel != b.channel) return a.channel < b.channel;
        if (a.start != b.start) return a.start < b.start;
        return a.program < b.program;
    });

    std::map<std::pair<ChannelId, Timestamp>, const SynthAiring*> at_slot;
    for (const SynthAiring& a : airings) at_slot[{a.channel, a.start}] = &a;

    // --- users ------------------------------------------------------------------
    std::vector<UserProfile> users;
    users.reserve(static_cast<size_t>(params.n_users));
    const int n_archetypes = 6;
    for (int u = 1; u <= params.n_users; ++u) {
        SplitMix64 rng(mix_seed(seed, 0x05E5, static_cast<std::uint64_t>(u)));
        UserProfile prof;
        prof.id = u;
        prof.archetype = (u - 1) % n_archetypes;

        // Archetypes anchor the top category (collaborative structure);
        // the secondary taste and per-category jitter are personal.
        int top = prof.archetype;  // archetypes lean on categories 0..5
        int second = static_cast<int>(rng.next_below(8));
        if (second == top) second = (second + 1) % 8;
        std::array<double, 8> base{};
        for (int cat = 0; cat < 8; ++cat) {
            base[static_cast<size_t>(cat)] = 0.15 + 0.2 * rng.next_double();
        }
        base[static_cast<size_t>(top)] = 1.0;
        base[static_cast<size_t>(second)] = 0.55;
        double denom = 0;
        for (int cat = 0; cat < 8; ++cat) {
            prof.affinity[static_cast<size_t>(cat)] =
                std::exp(params.category_affinity_concentration * base[static_cast<size_t>(cat)]);
            denom += prof.affinity[static_cast<size_t>(cat)];
        }
        for (double& a : prof.affinity) a /= denom;

        // Primary channel: prefer channels airing the top category; lower
        // channel indices get a global popularity edge.
        std::vector<double> w(static_cast<size_t>(params.n_channels), 0.0);
        bool any = false;
        for (int c = 0; c < params.n_channels; ++c) {
            if (channel_main[static_cast<size_t>(c)] == top) {
                w[static_cast<size_t>(c)] = 1.0 / (1.0 + 0.3 * c);
                any = true;
            }
        }
        if (!any) {
            for (int c = 0; c < params.n_channels; ++c) {
                w[static_cast<size_t>(c)] = 1.0 / (1.0 + 0.3 * c);
            }
        }
        prof.primary_channel = pick_weighted(rng, w) + 1;
        if (params.n_channels > 1 && params.channel_loyalty < 1.0) {
            w[static_cast<size_t>(prof.primary_channel - 1)] = 0;
            bool rest = false;
            for (double x : w) rest = rest || x > 0;
            if (!rest) {
                for (int c = 0; c < params.n_channels; ++c) {
                    if (c + 1 != prof.primary_channel) w[static_cast<size_t>(c)] = 1.0;
                }
            }
            prof.secondary_channel = pick_weighted(rng, w) + 1;
        } else {
            // Full loyalty collapses the user's world onto one channel.
            prof.secondary_channel = prof.primary_channel;
        }

        prof.habit = rng.next_below(2) == 0 ? DayPart::Evening
                                            : static_cast<DayPart>(rng.next_below(4));
        prof.sessions_per_week = 6 + static_cast<int>(rng.next_below(4));

        // Routine series on the favorite channels, weighted by quality and a
        // strong habit-day-part match.
        std::vector<const SynthProgram*> pool;
        for (size_t i = 0; i < base_program_count; ++i) {
            const SynthProgram& p = programs[i];
            if (p.is_series && (p.home_channel == prof.primary_channel ||
                                p.home_channel == prof.secondary_channel)) {
                pool.push_back(&p);
            }
        }
        std::vector<double> pw(pool.size());
        for (size_t i = 0; i < pool.size(); ++i) {
            double channel_bias = pool[i]->home_channel == prof.primary_channel ? 1.0 : 0.3;
            double habit_bias =
                daypart_of_slot(pool[i]->slot) == static_cast<int>(prof.habit) ? 3.0 : 0.5;
            // Personal jitter keeps same-archetype users from sharing one
            // routine wholesale.
            double jitter = std::exp(1.2 * rng.next_double());
            pw[i] = pool[i]->quality * channel_bias * habit_bias * jitter;
        }
        int routine_size = std::min<int>(10, static_cast<int>(pool.size()));
        for (int r = 0; r < routine_size; ++r) {
            int pick = pick_weighted(rng, pw);
            prof.routine.push_back(pool[static_cast<size_t>(pick)]->id);
            pw[static_cast<size_t>(pick)] = 0;
        }
        std::sort(prof.routine.begin(), prof.routine.end());
        users.push_back(std::move(prof));
    }

    // --- events --------------------------------------------------------------
    struct RawEvent {
        UserId user;
        ProgramId program;
        ChannelId channel;
        Timestamp watch_start;
        std::int64_t watched_s;
        bool catchup;
    };
    std::vector<RawEvent> events;

    auto slot_of_daypart = [](DayPart part, SplitMix64& rng) {
        switch (part) {
            case DayPart::Night: return static_cast<int>(rng.next_below(4));
            case DayPart::Morning: return 4 + static_cast<int>(rng.next_below(4));
            case DayPart::Afternoon: return 8 + static_cast<int>(rng.next_below(4));
            case DayPart::Evening: return 12 + static_cast<int>(rng.next_below(4));
        }
        return 12;
    };

    for (const UserProfile& prof : users) {
        SplitMix64 rng(mix_seed(seed, 0xE7E27, static_cast<std::uint64_t>(prof.id)));
        double max_affinity = *std::max_element(prof.affinity.begin(), prof.affinity.end());

        auto emit = [&](const SynthAiring* airing, Timestamp watch_start, bool catchup,
                        bool liked_hint) {
            const SynthProgram& meta = *airing->meta;
            bool is_routine =
                std::binary_search(prof.routine.begin(), prof.routine.end(), airing->program);
            double like_base = prof.affinity[static_cast<size_t>(meta.category)] / max_affinity;
            double like_prob = is_routine || liked_hint
                                   ? 0.9
                                   : 0.18 + 0.62 * like_base * (0.35 + 0.65 * meta.quality);
            double fraction = rng.next_double() < like_prob ? 0.55 + 0.43 * rng.next_double()
                                                            : 0.03 + 0.42 * rng.next_double();
            ProgramId program = airing->program;
            ChannelId channel = airing->channel;
            if (!catchup && meta.twin_id != 0 &&
                rng.next_double() < 0.4 * (1.0 - params.channel_loyalty)) {
                program = meta.twin_id;
                channel = airing->channel + kHdChannelOffset;
            }
            events.push_back({prof.id, program, channel, watch_start,
                              static_cast<std::int64_t>(fraction * kSlotSeconds), catchup});
        };

        for (int w = 0; w < params.n_weeks; ++w) {
            // Routine series: watched live at their slot with the repeat
            // probability; a missed one may be caught up later in the week.
            int routine_hits = 0;
            for (ProgramId r : prof.routine) {
                const SynthProgram* rp = by_id.at(r);
                Timestamp t = slot_time(w, rp->day, rp->slot);
                auto it = at_slot.find({rp->home_channel, t});
                if (it == at_slot.end() || it->second->program != r) continue;
                if (rng.next_double() < params.series_repeat_prob) {
                    emit(it->second, t, false, true);
                    ++routine_hits;
                    // Stay on the channel for the next slot now and then.
                    if (rng.next_double() < 0.35 && rp->slot + 1 < kSlotsPerDay) {
                        auto next = at_slot.find({rp->home_channel, t + kSlotSeconds});
                        if (next != at_slot.end()) emit(next->second, t + kSlotSeconds, false, false);
                    }
                } else if (rng.next_double() < params.catchup_share * 2.0) {
                    // Catch the missed episode up within the window.
                    int delay_slots = 8 + static_cast<int>(rng.next_below(90));
                    Timestamp ct = t + delay_slots * kSlotSeconds;
                    if (ct <= t + kCatchupWindowSeconds &&
                        ct < kScheduleStart + params.n_weeks * kSecondsPerWeek) {
                        events.push_back({prof.id, r, rp->home_channel, ct,
                                          static_cast<std::int64_t>((0.6 + 0.35 * rng.next_double()) *
                                                                    kSlotSeconds),
                                          true});
                    }
                }
            }

            // Exploratory sessions at (mostly) the habitual day-part.
            int sessions = std::max(2, prof.sessions_per_week - routine_hits / 2);
            for (int s = 0; s < sessions; ++s) {
                int day = static_cast<int>(rng.next_below(7));
                DayPart part = rng.next_double() < params.daypart_regularity
                                   ? prof.habit
                                   : static_cast<DayPart>(rng.next_below(4));
                int slot = slot_of_daypart(part, rng);
                int span = 1 + static_cast<int>(rng.next_below(2));
                for (int step = 0; step < span && slot + step < kSlotsPerDay; ++step) {
                    Timestamp t = slot_time(w, day, slot + step);
                    ChannelId channel;
                    double roll = rng.next_double();
                    if (roll < params.channel_loyalty) {
                        channel = prof.primary_channel;
                    } else if (roll < params.channel_loyalty + (1.0 - params.channel_loyalty) * 0.5) {
                        channel = prof.secondary_channel;
                    } else {
                        channel = static_cast<ChannelId>(
                                      rng.next_below(static_cast<std::uint64_t>(params.n_channels))) +
                                  1;
                    }
                    bool catchup = rng.next_double() < params.catchup_share;
                    const SynthAiring* airing = nullptr;
                    if (catchup) {
                        auto lo = at_slot.lower_bound({channel, t - kCatchupWindowSeconds});
                        auto hi = at_slot.lower_bound({channel, t});
                        std::vector<const SynthAiring*> recent;
                        for (auto i2 = lo; i2 != hi; ++i2) recent.push_back(i2->second);
                        if (!recent.empty()) {
                            std::vector<double> rw(recent.size());
                            for (size_t i2 = 0; i2 < recent.size(); ++i2) {
                                rw[i2] = recent[i2]->meta->quality + 0.05;
                            }
                            airing = recent[static_cast<size_t>(pick_weighted(rng, rw))];
                        } else {
                            catchup = false;
                        }
                    }
                    if (!catchup) {
                        auto it = at_slot.find({channel, t});
                        if (it == at_slot.end()) continue;
                        airing = it->second;
                    }
                    emit(airing, catchup ? t : airing->start, catchup, false);
                }
            }
        }
    }

    std::sort(events.begin(), events.end(), [](const RawEvent& a, const RawEvent& b) {
        if (a.user != b.user) return a.user < b.user;
        if (a.watch_start != b.watch_start) return a.watch_start < b.watch_start;
        return a.program < b.program;
    });

    // --- files -----------------------------------------------------------------
    SynthOutput out;
    out.epg_path = (std::filesystem::path(out_dir) / "epg.csv").string();
    out.views_path = (std::filesystem::path(out_dir) / "views.jsonl").string();
    out.manifest_path = (std::filesystem::path(out_dir) / "manifest.json").string();

    {
        std::ofstream epg(out.epg_path);
        if (!epg) throw std::runtime_error("cannot write " + out.epg_path);
        epg << "program_id,title,description,actors,directors,category,subcategory,"
               "is_series,episode_count,duration_s,channel_id,start_utc,end_utc\n";
        for (const SynthAiring& a : airings) {
            const SynthProgram& p = *a.meta;
            epg << p.id << ',' << csv_escape(p.title) << ',' << csv_escape(p.description) << ','
                << csv_escape(join(p.actors, '|')) << ',' << csv_escape(join(p.directors, '|'))
                << ',' << to_string(static_cast<Category>(p.category)) << ',' << p.subcategory
                << ',' << (p.is_series ? "true" : "false") << ',' << p.episode_count << ','
                << kSlotSeconds << ',' << a.channel << ',' << format_rfc3339(a.start) << ','
                << format_rfc3339(a.start + kSlotSeconds) << "\n";
        }
    }
    {
        std::ofstream views(out.views_path);
        if (!views) throw std::runtime_error("cannot write " + out.views_path);
        for (const RawEvent& e : events) {
            views << "{\"user\":" << e.user << ",\"program\":" << e.program
                  << ",\"channel\":" << e.channel << ",\"watch_start\":" << e.watch_start
                  << ",\"watched_s\":" << e.watched_s << ",\"mode\":\""
                  << (e.catchup ? "catchup" : "live") << "\"}\n";
        }
    }
    {
        nlohmann::json manifest;
        manifest["params"] = {
            {"n_users", params.n_users},
            {"n_channels", params.n_channels},
            {"programs_per_week", params.programs_per_week},
            {"n_weeks", params.n_weeks},
            {"seed", params.seed},
            {"channel_loyalty", params.channel_loyalty},
            {"category_affinity_concentration", params.category_affinity_concentration},
            {"series_repeat_prob", params.series_repeat_prob},
            {"daypart_regularity", params.daypart_regularity},
            {"catchup_share", params.catchup_share},
        };
        manifest["hd_channel_offset"] = kHdChannelOffset;
        manifest["schedule_start"] = kScheduleStart;
        nlohmann::json users_json = nlohmann::json::array();
        for (const UserProfile& prof : users) {
            users_json.push_back({
                {"user", prof.id},
                {"archetype", prof.archetype},
                {"primary_channel", prof.primary_channel},
                {"secondary_channel", prof.secondary_channel},
                {"habit_daypart", static_cast<int>(prof.habit)},
                {"sessions_per_week", prof.sessions_per_week},
                {"routine", prof.routine},
            });
        }
        manifest["users"] = std::move(users_json);
        nlohmann::json progs_json = nlohmann::json::array();
        for (const SynthProgram& p : programs) {
            progs_json.push_back({
                {"program", p.id},
                {"quality", p.quality},
                {"twin", p.twin_id},
                {"channel", p.home_channel},
            });
        }
        manifest["programs"] = std::move(progs_json);
        std::ofstream mf(out.manifest_path);
        if (!mf) throw std::runtime_error("cannot write " + out.manifest_path);
        mf << manifest.dump(2) << "\n";
    }

    out.n_programs = static_cast<std::int64_t>(programs.size());
    out.n_airings = static_cast<std::int64_t>(airings.size());
    out.n_events = static_cast<std::int64_t>(events.size());
    return out;
}

}  // namespace tvrec
