// Copyright 2026 The saltrack Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <cstdio>
#include <iterator>
#include <array>
#include <random>
#include <set>

#include "saltrack/numbers.hpp"
#include "saltrack/records.hpp"

namespace saltrack {

namespace {

struct TeamDef {
  std::string_view city;
  std::string_view name;
};

constexpr std::array<TeamDef, 12> kTeams = {{
    {"Atlanta", "Hawks"},      {"Boston", "Celtics"},
    {"Milwaukee", "Bucks"},    {"New York", "Knicks"},
    {"Los Angeles", "Lakers"}, {"San Antonio", "Spurs"},
    {"Golden State", "Warriors"}, {"Detroit", "Pistons"},
    {"Cleveland", "Cavaliers"}, {"Miami", "Heat"},
    {"Denver", "Nuggets"},     {"Utah", "Jazz"},
}};

constexpr std::string_view kFirstNames[] = {
    "Jabari", "Derrick", "Courtney", "Greg",   "Malcolm", "Mirza",
    "John",   "Carmelo", "Kevin",    "Tony",   "Marcus",  "Andre",
    "Dwight", "Paul",    "Chris",    "Jordan", "Kyle",    "Victor",
    "Damian", "Jamal",   "Rudy",     "Gordon", "Tyson",   "Isaiah",
    "Avery",  "Jrue",    "Nikola",   "Zach",   "Dario",   "Elfrid"};

constexpr std::string_view kLastNames[] = {
    "Parker",    "Rose",      "Lee",       "Monroe",    "Brogdon",
    "Teletovic", "Henson",    "Anthony",   "Love",      "Wagner",
    "Smart",     "Drummond",  "Howard",    "Millsap",   "Clarkson",
    "Lowry",     "Oladipo",   "Lillard",   "Crawford",  "Gobert",
    "Hayward",   "Chandler",  "Thomas",    "Bradley",   "Holiday",
    "Jokic",     "LaVine",    "Saric",     "Payton",    "Aldridge",
    "Leonard",   "Ginobili",  "Mills",     "Gasol",     "Randle",
    "Russell",   "Nance",     "Young",     "Ingram",    "Whiteside",
    "Dragic",    "Winslow",   "Richardson", "Johnson",  "Harris",
    "Jackson",   "Bullock",   "Morris",    "Baynes",    "Irving",
    "Korver",    "Shumpert",  "Frye",      "Faried",    "Nurkic",
    "Murray",    "Barton",    "Favors",    "Hood",      "Exum",
    "Ingles",    "Horford",   "Crowder",   "Olynyk",    "Schroder",
    "Bazemore",  "Hardaway",  "Dedmon",    "Ilyasova",  "Middleton",
    "Dellavedova", "Snell",   "Hernangomez", "Noah",    "Porzingis",
    "Calderon",  "Jennings",  "Mozgov",    "Deng",      "Clarke",
    "Ennis",     "Thornwell", "Caldwell",  "Boatright", "Vonleh",
    "Zeller",    "Valanciunas", "Whitehead", "Okafor",  "Embiid",
    "Covington", "Stauskas",  "Luwawu",    "Holmes",    "Bayless",
    "Ivey"};

struct PlayerDef {
  std::string first;
  std::string last;
};

std::vector<std::vector<PlayerDef>> make_league(std::size_t roster_size) {
  std::vector<std::vector<PlayerDef>> rosters(kTeams.size());
  std::size_t k = 0;
  for (std::size_t t = 0; t < kTeams.size(); ++t) {
    for (std::size_t j = 0; j < roster_size; ++j, ++k) {
      std::string last(kLastNames[k % std::size(kLastNames)]);
      if (k >= std::size(kLastNames)) last += std::to_string(k / std::size(kLastNames) + 1);
      rosters[t].push_back(
          {std::string(kFirstNames[(k * 7) % std::size(kFirstNames)]), last});
    }
  }
  return rosters;
}

int uniform_int(std::mt19937_64& rng, int lo, int hi) {
  // Inclusive bounds. Modulo bias is irrelevant at these ranges.
  return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Accumulates tokens together with their gold labels.
class SummaryBuilder {
 public:
  explicit SummaryBuilder(const GameData& game) : game_(game) {}

  void word(std::string_view w) { push(std::string(w), 0, {}, {}, {}); }
  void words(std::initializer_list<std::string_view> ws) {
    for (auto w : ws) word(w);
  }

  void name(const Entity& e, std::string_view base_filter = {}) {
    for (const Record* r : game_.records_of(e.id)) {
      if (r->attribute.is_numeric) continue;
      if (!base_filter.empty() && base_attribute(r->attribute.id) != base_filter) {
        continue;
      }
      push(r->value, 1, e.id, r->attribute.id, {});
    }
  }

  void number(const Entity& e, std::string_view attribute, bool as_words) {
    const Record* r = game_.find_record(e.id, attribute);
    const int v = *r->numeric_value();
    const bool words = as_words && NumberLexicon::instance().covers(v);
    push(render_number(v, words), 1, e.id, std::string(attribute),
         static_cast<std::uint8_t>(words ? 1 : 0));
  }

  LabeledSummary take() { return std::move(summary_); }

 private:
  void push(std::string tok, std::uint8_t z, std::optional<std::string> e,
            std::optional<std::string> a, std::optional<std::uint8_t> n) {
    summary_.tokens.push_back(std::move(tok));
    summary_.z.push_back(z);
    summary_.e.push_back(std::move(e));
    summary_.a.push_back(std::move(a));
    summary_.n.push_back(n);
  }

  const GameData& game_;
  LabeledSummary summary_;
};

GameData make_game(std::mt19937_64& rng, std::size_t index,
                   std::size_t n_players,
                   const std::vector<std::vector<PlayerDef>>& rosters,
                   double dnp_probability) {
  GameData g;
  char id[32];
  std::snprintf(id, sizeof id, "synth-%04zu", index);
  g.game_id = id;
  std::snprintf(id, sizeof id, "2016-%02zu-%02zu", index / 28 % 12 + 1,
                index % 28 + 1);
  g.date = id;

  const std::size_t home = rng() % kTeams.size();
  std::size_t vis = rng() % (kTeams.size() - 1);
  if (vis >= home) ++vis;

  // All team-line values distinct so bare numbers resolve unambiguously.
  std::array<int, 10> line{};
  for (;;) {
    line = {uniform_int(rng, 80, 130), uniform_int(rng, 0, 60),
            uniform_int(rng, 0, 60),   uniform_int(rng, 30, 55),
            uniform_int(rng, 15, 30),  uniform_int(rng, 80, 130),
            uniform_int(rng, 0, 60),   uniform_int(rng, 0, 60),
            uniform_int(rng, 30, 55),  uniform_int(rng, 15, 30)};
    std::set<int> distinct(line.begin(), line.end());
    if (distinct.size() == line.size()) break;
  }

  auto add_team = [&](std::size_t t, Side side, const int* values) {
    Entity e;
    e.kind = EntityKind::kTeam;
    e.side = side;
    e.id = "T:" + std::string(kTeams[t].city) + " " + std::string(kTeams[t].name);
    auto city = split_tokens(kTeams[t].city);
    auto name = split_tokens(kTeams[t].name);
    e.name_tokens = city;
    e.name_tokens.insert(e.name_tokens.end(), name.begin(), name.end());
    for (std::size_t k = 0; k < city.size(); ++k) {
      g.records.push_back({e.id,
                           {k ? "TEAM-CITY-" + std::to_string(k + 1) : "TEAM-CITY",
                            false},
                           city[k]});
    }
    for (std::size_t k = 0; k < name.size(); ++k) {
      g.records.push_back({e.id,
                           {k ? "TEAM-NAME-" + std::to_string(k + 1) : "TEAM-NAME",
                            false},
                           name[k]});
    }
    const char* keys[] = {"TEAM-PTS", "TEAM-WINS", "TEAM-LOSSES", "TEAM-REB",
                          "TEAM-AST"};
    for (int k = 0; k < 5; ++k) {
      g.records.push_back({e.id, {keys[k], true}, std::to_string(values[k])});
    }
    g.entities.push_back(std::move(e));
  };
  add_team(home, Side::kHome, line.data());
  add_team(vis, Side::kVisitor, line.data() + 5);

  const std::size_t n_home = (n_players + 1) / 2;
  auto add_players = [&](std::size_t t, Side side, std::size_t count) {
    const auto& roster = rosters[t];
    std::vector<std::size_t> order(roster.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[rng() % i]);
    }
    order.resize(count);
    std::sort(order.begin(), order.end());
    for (std::size_t j : order) {
      const PlayerDef& p = roster[j];
      Entity e;
      e.kind = EntityKind::kPlayer;
      e.side = side;
      e.id = "P:" + p.first + " " + p.last;
      e.name_tokens = {p.first, p.last};
      g.records.push_back({e.id, {"FIRST_NAME", false}, p.first});
      g.records.push_back({e.id, {"SECOND_NAME", false}, p.last});
      if (uniform01(rng) >= dnp_probability) {
        const std::pair<const char*, std::pair<int, int>> stats[] = {
            {"PTS", {0, 35}}, {"REB", {0, 15}}, {"AST", {0, 12}},
            {"STL", {0, 4}},  {"BLK", {0, 4}},  {"MIN", {8, 40}}};
        for (const auto& [key, range] : stats) {
          g.records.push_back(
              {e.id, {key, true},
               std::to_string(uniform_int(rng, range.first, range.second))});
        }
      }
      g.entities.push_back(std::move(e));
    }
  };
  add_players(home, Side::kHome, n_home);
  add_players(vis, Side::kVisitor, n_players - n_home);
  return g;
}

LabeledSummary write_summary(const GameData& g, std::size_t style,
                             std::size_t players_mentioned) {
  const Entity* home = g.team(Side::kHome);
  const Entity* vis = g.team(Side::kVisitor);
  auto pts = [&](const Entity* e) {
    return *g.find_record(e->id, "TEAM-PTS")->numeric_value();
  };
  const Entity* winner = pts(home) > pts(vis) ? home : vis;
  const Entity* loser = winner == home ? vis : home;

  std::vector<const Entity*> played;
  for (const auto& e : g.entities) {
    if (e.kind == EntityKind::kPlayer && g.find_record(e.id, "PTS")) {
      played.push_back(&e);
    }
  }
  std::stable_sort(played.begin(), played.end(),
                   [&](const Entity* a, const Entity* b) {
                     return *g.find_record(a->id, "PTS")->numeric_value() >
                            *g.find_record(b->id, "PTS")->numeric_value();
                   });
  if (played.size() > players_mentioned) played.resize(players_mentioned);

  SummaryBuilder s(g);
  if (style == 0) {
    auto small_as_words = [&](const Entity& e, std::string_view attr) {
      const int v = *g.find_record(e.id, attr)->numeric_value();
      s.number(e, attr, v < 10);
    };
    s.word("The");
    s.name(*winner);
    s.word("defeated");
    s.word("the");
    s.name(*loser);
    s.word(",");
    s.number(*winner, "TEAM-PTS", false);
    s.word("-");
    s.number(*loser, "TEAM-PTS", false);
    s.word(".");
    for (std::size_t i = 0; i < played.size(); ++i) {
      const Entity& p = *played[i];
      s.name(p);
      if (i == 0) {
        s.words({"led", "the"});
        s.name(*g.team(p.side), "TEAM-NAME");
        s.word("with");
        small_as_words(p, "PTS");
        s.words({"points", ","});
        small_as_words(p, "REB");
        s.words({"rebounds", "and"});
        small_as_words(p, "AST");
        s.words({"assists", "."});
      } else {
        s.word("added");
        small_as_words(p, "PTS");
        s.words({"points", "and"});
        small_as_words(p, "REB");
        s.words({"rebounds", "."});
      }
    }
    s.word("The");
    s.name(*loser, "TEAM-NAME");
    s.words({"will", "look", "to", "bounce", "back", "in", "their", "next",
             "game", "."});
  } else {
    s.word("The");
    s.name(*winner);
    s.word("(");
    s.number(*winner, "TEAM-WINS", false);
    s.word("-");
    s.number(*winner, "TEAM-LOSSES", false);
    s.words({")", "beat", "the"});
    s.name(*loser);
    s.word("(");
    s.number(*loser, "TEAM-WINS", false);
    s.word("-");
    s.number(*loser, "TEAM-LOSSES", false);
    s.words({")", "by", "a", "score", "of"});
    s.number(*winner, "TEAM-PTS", false);
    s.word("-");
    s.number(*loser, "TEAM-PTS", false);
    s.word(".");
    for (const Entity* p : played) {
      s.name(*p);
      s.words({"finished", "with"});
      s.number(*p, "PTS", false);
      s.words({"points", ","});
      s.number(*p, "AST", false);
      s.words({"assists", "and"});
      s.number(*p, "REB", false);
      s.words({"rebounds", "."});
    }
    s.words({"Both", "teams", "are", "back", "in", "action", "on", "Friday",
             "."});
  }
  return s.take();
}

}  // namespace

Dataset synth_corpus(const SynthOptions& opt) {
  Dataset ds;
  const std::size_t n_players = std::max<std::size_t>(opt.n_players, 2);
  const std::size_t n_writers = std::clamp<std::size_t>(opt.n_writers, 1, 2);
  const auto rosters =
      make_league(std::max<std::size_t>(6, (n_players + 1) / 2));
  std::mt19937_64 rng(opt.seed);

  const std::size_t total = opt.n_games + opt.dev_games + opt.test_games;
  for (std::size_t i = 0; i < total; ++i) {
    GameData game = make_game(rng, i, n_players, rosters, opt.dnp_probability);
    auto& split = i < opt.n_games                  ? ds.train
                  : i < opt.n_games + opt.dev_games ? ds.dev
                                                    : ds.test;
    if (opt.every_writer_per_game) {
      for (std::size_t w = 0; w < n_writers; ++w) {
        Document d{game, write_summary(game, w, opt.players_mentioned)};
        d.game.game_id += "-w" + std::to_string(w);
        d.game.writer = "writer_" + std::to_string(w);
        split.push_back(std::move(d));
      }
    } else {
      const std::size_t w = n_writers == 1 ? 0 : rng() % n_writers;
      game.writer = "writer_" + std::to_string(w);
      LabeledSummary summary = write_summary(game, w, opt.players_mentioned);
      split.push_back({std::move(game), std::move(summary)});
    }
  }
  for (const auto* split : {&ds.train, &ds.dev, &ds.test}) {
    for (const auto& d : *split) ds.writers.add(d.game.writer);
  }
  return ds;
}

Dataset synth_corpus(std::uint64_t seed, std::size_t n_games,
                     std::size_t n_players) {
  SynthOptions opt;
  opt.seed = seed;
  opt.n_games = n_games;
  opt.n_players = n_players;
  return synth_corpus(opt);
}

}  // namespace saltrack
