// Copyright 2026 The Amity Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy at
// http://www.apache.org/licenses/LICENSE-2.0

#include <gtest/gtest.h>

#include <filesystem>

#include "amity/checksum.hpp"
#include "amity/error.hpp"
#include "amity/store.hpp"
#include "support/common.hpp"

using namespace amity;
using namespace amity::store;
using amity::testing::read_text;
using amity::testing::TempDir;
using amity::testing::write_text;

namespace fs = std::filesystem;

namespace {

StoreOptions quiet(std::vector<std::string>* warnings = nullptr, bool sync = false) {
  StoreOptions o;
  o.sync = sync;
  o.id_seed = 1;
  o.on_warning = [warnings](const std::string& w) {
    if (warnings) warnings->push_back(w);
  };
  return o;
}

ErrorCode open_code(const fs::path& dir) {
  try {
    Store::open(dir, quiet());
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::IoError;
}

// A little of everything: users, a group with members and posts, an exit,
// a chat session and seeded content.
void populate(Store& s) {
  s.register_user("alice@example.com", "Alice", "hash-a", 1);
  s.register_user("bob@example.com", "Bob", "hash-b", 2);
  s.register_user("carol@example.com", "Carol", "hash-c", 3);
  const auto g = s.create_group("alice@example.com", "Anxiety Support", 4);
  s.join_group("bob@example.com", g.group_id, 5);
  s.join_group("carol@example.com", g.group_id, 6);
  s.post_message("alice@example.com", g.group_id, "welcome", 7);
  s.post_message("bob@example.com", g.group_id, "thanks", 8);
  s.exit_group("alice@example.com", g.group_id, 9);
  const auto session = s.start_session("bob@example.com", 10);
  s.append_exchange(session.session_id,
                    {dazai::Speaker::user, "hi", std::nullopt, std::nullopt, 11},
                    {dazai::Speaker::bot, "hello", "greeting", 0.9, 12});
  Content c;
  c.suggestions = {{"anxiety", {"oats"}, {"walk"}}};
  c.doctors = {{"Dr A", "desc", "9-5", "addr", "123"}};
  s.seed_content(c);
}

std::vector<std::size_t> frame_ends(const std::string& log) {
  std::vector<std::size_t> ends;
  std::size_t at = 0;
  while (at + 8 <= log.size()) {
    at += 8 + get_u32_le(log.data() + at);
    ends.push_back(at);
  }
  return ends;
}

}  // namespace

TEST(Store, EmptyDirectory) {
  TempDir dir;
  auto s = Store::open(dir / "db", quiet());
  EXPECT_EQ(s->event_count(), 0u);
  EXPECT_EQ(read_text(dir / "db/VERSION"), "1\n");
  EXPECT_TRUE(fs::exists(dir / "db/events.log"));
  EXPECT_EQ(s->read([](const StoreState& st) { return st.users.size(); }), 0u);
}

TEST(Store, VersionMismatch) {
  TempDir dir;
  write_text(dir / "VERSION", "2\n");
  EXPECT_EQ(open_code(dir.path()), ErrorCode::VersionMismatch);
}

TEST(Store, ReopenReproducesState) {
  TempDir dir;
  std::string before;
  {
    auto s = Store::open(dir.path(), quiet());
    populate(*s);
    before = s->read([](const StoreState& st) { return st.canonical_json(); });
    EXPECT_EQ(s->event_count(), 13u);
  }
  auto s = Store::open(dir.path(), quiet());
  EXPECT_EQ(s->read([](const StoreState& st) { return st.canonical_json(); }), before);
  EXPECT_EQ(s->event_count(), 13u);
}

TEST(Store, ThreeEventsRoundTrip) {
  TempDir dir;
  {
    auto s = Store::open(dir.path(), quiet());
    s->register_user("a@x.io", "A", "h", 1);
    const auto g = s->create_group("a@x.io", "G", 2);
    s->post_message("a@x.io", g.group_id, "hi", 3);
  }
  auto s = Store::open(dir.path(), quiet());
  EXPECT_EQ(s->event_count(), 3u);
  EXPECT_EQ(s->get_user("a@x.io").name, "A");
}

TEST(Store, SeqsAreConsecutive) {
  TempDir dir;
  auto s = Store::open(dir.path(), quiet());
  std::vector<std::uint64_t> seqs;
  s->set_event_hook([&](const EventRecord& r, const StoreState& st) {
    seqs.push_back(r.seq);
    EXPECT_EQ(st.last_seq, r.seq);
  });
  s->register_user("a@x.io", "A", "h", 1);
  s->register_user("b@x.io", "B", "h", 2);
  EXPECT_EQ(seqs, (std::vector<std::uint64_t>{1, 2}));
}

TEST(Store, GarbageTailIsDropped) {
  TempDir dir;
  {
    auto s = Store::open(dir.path(), quiet());
    populate(*s);
  }
  const auto clean = read_text(dir / "events.log");
  write_text(dir / "events.log", clean + std::string("\x07\x00\x00garbage!", 11));
  std::vector<std::string> warnings;
  auto s = Store::open(dir.path(), quiet(&warnings));
  EXPECT_EQ(s->event_count(), 13u);
  ASSERT_EQ(warnings.size(), 1u);
  EXPECT_NE(warnings[0].find("torn tail"), std::string::npos);
  EXPECT_EQ(read_text(dir / "events.log"), clean);
  s->register_user("z@x.io", "Z", "h", 99);
  EXPECT_EQ(s->event_count(), 14u);
}

TEST(Store, EveryPrefixReplaysToAValidState) {
  TempDir dir;
  {
    auto s = Store::open(dir / "src", quiet());
    populate(*s);
  }
  const auto log = read_text(dir / "src/events.log");
  const auto ends = frame_ends(log);
  ASSERT_EQ(ends.size(), 13u);
  ASSERT_EQ(ends.back(), log.size());

  // Cut at every byte: the store recovers exactly the whole frames before it.
  for (std::size_t cut = 0; cut <= log.size(); ++cut) {
    const auto sub = dir / ("cut" + std::to_string(cut));
    fs::create_directories(sub);
    write_text(sub / "events.log", log.substr(0, cut));
    auto s = Store::open(sub, quiet());
    const auto whole = static_cast<std::uint64_t>(
        std::upper_bound(ends.begin(), ends.end(), cut) - ends.begin());
    ASSERT_EQ(s->event_count(), whole) << "cut at " << cut;
    s->read([](const StoreState& st) {
      st.groups.check_invariants();
      return 0;
    });
    fs::remove_all(sub);
  }
}

TEST(Store, CorruptionBeforeValidRecordsIsFatal) {
  TempDir dir;
  {
    auto s = Store::open(dir.path(), quiet());
    populate(*s);
  }
  auto log = read_text(dir / "events.log");
  const auto ends = frame_ends(log);
  log[ends[3] + 12] ^= 0x5A;  // inside frame 5's JSON
  write_text(dir / "events.log", log);
  EXPECT_EQ(open_code(dir.path()), ErrorCode::CorruptLog);
}

TEST(Store, ValidFrameThatCannotApplyIsCorrupt) {
  TempDir dir;
  write_text(dir / "events.log",
             EventLog::encode_frame({1, EventKind::MemberJoined,
                                     {{"group_id", "gX"}, {"email", "a"}, {"timestamp", 1}}}));
  EXPECT_EQ(open_code(dir.path()), ErrorCode::CorruptLog);

  TempDir gap;
  write_text(gap / "events.log",
             EventLog::encode_frame({2, EventKind::UserRegistered,
                                     {{"email", "a"}, {"name", "A"}, {"password_hash", "h"},
                                      {"created_at", 1}}}));
  EXPECT_EQ(open_code(gap.path()), ErrorCode::CorruptLog);
}

TEST(Store, TenThousandAppendsReplayToTheSameFold) {
  TempDir dir;
  std::string live;
  {
    auto s = Store::open(dir.path(), quiet());
    s->register_user("a@x.io", "A", "h", 0);
    s->register_user("b@x.io", "B", "h", 0);
    const auto g = s->create_group("a@x.io", "G", 0);
    s->join_group("b@x.io", g.group_id, 0);
    for (int i = 5; i < 10000; ++i) {
      s->post_message(i % 2 ? "a@x.io" : "b@x.io", g.group_id, "m" + std::to_string(i), i);
    }
    EXPECT_EQ(s->event_count(), 9999u);
    s->register_user("c@x.io", "C", "h", 0);
    live = s->read([](const StoreState& st) { return st.canonical_json(); });
  }
  auto s = Store::open(dir.path(), quiet());
  EXPECT_EQ(s->event_count(), 10000u);
  EXPECT_EQ(s->read([](const StoreState& st) { return st.canonical_json(); }), live);
}

TEST(Store, Queries) {
  TempDir dir;
  auto s = Store::open(dir.path(), quiet());
  try {
    s->get_user("ghost@x.io");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotFound);
  }
  populate(*s);
  const auto gid = s->read([](const StoreState& st) { return st.groups.groups().begin()->first; });
  const auto g = s->get_group(gid);
  EXPECT_EQ(g.members, (std::vector<std::string>{"bob@example.com", "carol@example.com"}));
  EXPECT_EQ(g.admin, "bob@example.com");
  EXPECT_EQ(s->messages(gid, 0).size(), 2u);
  EXPECT_EQ(s->messages(gid, 1).size(), 1u);
  EXPECT_THROW(s->get_group("nope"), Error);
  EXPECT_THROW(s->session("nope"), Error);
  EXPECT_EQ(s->content().doctors.size(), 1u);
}

TEST(Store, CommandErrorsLeaveNoEvent) {
  TempDir dir;
  auto s = Store::open(dir.path(), quiet());
  s->register_user("a@x.io", "A", "h", 1);
  EXPECT_THROW(s->register_user("a@x.io", "A2", "h", 2), Error);
  EXPECT_THROW(s->create_group("ghost@x.io", "G", 3), Error);
  EXPECT_THROW(s->create_group("a@x.io", "", 3), Error);
  EXPECT_THROW(s->join_group("a@x.io", "nope", 3), Error);
  EXPECT_EQ(s->event_count(), 1u);
}

TEST(Store, SessionsSurviveRestart) {
  TempDir dir;
  std::string first, second;
  {
    auto s = Store::open(dir.path(), quiet());
    s->register_user("a@x.io", "A", "h", 1);
    first = s->start_session("a@x.io", 2).session_id;
    second = s->start_session("a@x.io", 3).session_id;
    EXPECT_NE(first, second);
    EXPECT_EQ(s->active_session("a@x.io"), second);
    s->append_exchange(second, {dazai::Speaker::user, "hi", std::nullopt, std::nullopt, 4},
                       {dazai::Speaker::bot, "hello", "greeting", 0.8, 5});
    // Stamps must move forward.
    EXPECT_THROW(s->append_exchange(second,
                                    {dazai::Speaker::user, "x", std::nullopt, std::nullopt, 5},
                                    {dazai::Speaker::bot, "y", "t", 0.5, 6}),
                 Error);
  }
  auto s = Store::open(dir.path(), quiet());
  EXPECT_EQ(s->active_session("a@x.io"), second);
  const auto session = s->session(second);
  ASSERT_EQ(session.turns.size(), 2u);
  EXPECT_EQ(session.turns[1].tag, "greeting");
  EXPECT_EQ(session.turns[1].confidence, 0.8);
  EXPECT_TRUE(s->session(first).turns.empty());
}

TEST(Store, DurableWithSyncEnabled) {
  TempDir dir;
  {
    auto s = Store::open(dir.path(), quiet(nullptr, true));
    s->register_user("a@x.io", "A", "h", 1);
  }
  EXPECT_EQ(Store::open(dir.path(), quiet())->event_count(), 1u);
}

TEST(Content, ParsesBundledFile) {
  const auto c = parse_content(read_text(amity::testing::data_path("content.json")));
  ASSERT_EQ(c.suggestions.size(), 3u);
  for (const auto& plan : c.suggestions) {
    EXPECT_FALSE(plan.diet.empty());
    EXPECT_FALSE(plan.exercise.empty());
  }
  EXPECT_FALSE(c.doctors.empty());
  EXPECT_EQ(parse_content(content_to_json(c).dump()), c);
}

TEST(Content, RejectsBadShapes) {
  const auto code = [](const std::string& text) {
    try {
      parse_content(text);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::IoError;
  };
  EXPECT_EQ(code("{"), ErrorCode::ParseError);
  EXPECT_EQ(code(R"({"suggestions":[{"topic":"stress","diet":["a"],"exercise":["b"]}]})"),
            ErrorCode::SchemaError);
  EXPECT_EQ(code(R"({"suggestions":[{"topic":"anxiety","diet":[],"exercise":["b"]}]})"),
            ErrorCode::SchemaError);
  EXPECT_EQ(code(R"({"suggestions":[{"topic":"anxiety","diet":["a"],"exercise":["b"]},)"
                 R"({"topic":"anxiety","diet":["a"],"exercise":["b"]}]})"),
            ErrorCode::SchemaError);
  EXPECT_EQ(code(R"({"doctors":[{"name":"A","description":"d","timings":"t","address":"a"}]})"),
            ErrorCode::SchemaError);
  EXPECT_EQ(code(R"({"doctors":[{"name":"A","description":"d","timings":"t","address":"a",)"
                 R"("contact_number":""}]})"),
            ErrorCode::SchemaError);
  EXPECT_EQ(code(R"({"extras":[]})"), ErrorCode::SchemaError);
}

TEST(Content, SeedReplacesAndPersists) {
  TempDir dir;
  const auto c = parse_content(read_text(amity::testing::data_path("content.json")));
  {
    auto s = Store::open(dir.path(), quiet());
    Content old;
    old.suggestions = {{"anxiety", {"x"}, {"y"}}};
    s->seed_content(old);
    s->seed_content(c);
  }
  EXPECT_EQ(Store::open(dir.path(), quiet())->content(), c);
}
