// Copyright 2026 The Amity Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy at
// http://www.apache.org/licenses/LICENSE-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "amity/constellation.hpp"
#include "amity/error.hpp"
#include "amity/random.hpp"

using namespace amity;
using namespace amity::constellation;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::IoError;  // sentinel: no error
}

std::string user(std::size_t i) { return "user" + std::to_string(i) + "@example.com"; }

}  // namespace

TEST(Constellation, CreateMakesCreatorSoleAdmin) {
  GroupDirectory d;
  const auto& g = d.create_group("alice", "Anxiety Support", "g1", 100);
  EXPECT_EQ(g.admin, "alice");
  EXPECT_EQ(g.members, std::vector<std::string>{"alice"});
  EXPECT_EQ(g.created_at, 100);
  d.check_invariants();
}

TEST(Constellation, NameValidation) {
  GroupDirectory d;
  EXPECT_EQ(code_of([&] { d.create_group("a", "", "g1", 0); }), ErrorCode::InvalidName);
  EXPECT_EQ(code_of([&] { d.create_group("a", "   ", "g1", 0); }), ErrorCode::InvalidName);
  EXPECT_EQ(code_of([&] { d.create_group("a", std::string(65, 'x'), "g1", 0); }),
            ErrorCode::InvalidName);
  EXPECT_NO_THROW(d.create_group("a", std::string(64, 'x'), "g1", 0));
  // 64 code points of a multi-byte character are still within the limit.
  std::string wide;
  for (int i = 0; i < 64; ++i) wide += "é";
  EXPECT_NO_THROW(d.create_group("a", wide, "g2", 0));
  EXPECT_EQ(code_of([&] { d.create_group("a", wide + "é", "g3", 0); }), ErrorCode::InvalidName);
}

TEST(Constellation, SameNameDistinctIds) {
  GroupDirectory d;
  d.create_group("a", "Support", "g1", 0);
  d.create_group("b", "Support", "g2", 1);
  EXPECT_EQ(d.group_count(), 2u);
  EXPECT_EQ(d.search_groups("support").size(), 2u);
}

TEST(Constellation, SearchIsCaseInsensitiveOrderedAndPrivate) {
  GroupDirectory d;
  d.create_group("a", "Anxiety Support", "g1", 10);
  d.create_group("b", "Sleep Help", "g2", 5);
  d.create_group("c", "ANXIOUS parents", "g3", 20);
  const auto anx = d.search_groups("anx");
  ASSERT_EQ(anx.size(), 2u);
  EXPECT_EQ(anx[0].name, "Anxiety Support");
  EXPECT_EQ(anx[1].name, "ANXIOUS parents");
  const auto all = d.search_groups("");
  ASSERT_EQ(all.size(), 3u);
  EXPECT_EQ(all[0].group_id, "g2");
  EXPECT_EQ(all[0].member_count, 1u);
  EXPECT_TRUE(d.search_groups("zzz").empty());
}

TEST(Constellation, JoinCapAt256) {
  GroupDirectory d;
  d.create_group(user(0), "Big", "g", 0);
  for (std::size_t i = 1; i < 255; ++i) d.join_group(user(i), "g");
  EXPECT_EQ(d.get("g").members.size(), 255u);
  d.join_group(user(255), "g");
  EXPECT_EQ(d.get("g").members.size(), 256u);
  EXPECT_EQ(code_of([&] { d.join_group(user(256), "g"); }), ErrorCode::GroupFull);
  EXPECT_EQ(d.get("g").members.size(), 256u);
  d.check_invariants();
}

TEST(Constellation, JoinErrors) {
  GroupDirectory d;
  d.create_group("a", "G", "g", 0);
  EXPECT_EQ(code_of([&] { d.join_group("b", "nope"); }), ErrorCode::GroupNotFound);
  d.join_group("b", "g");
  EXPECT_EQ(code_of([&] { d.join_group("b", "g"); }), ErrorCode::AlreadyMember);
  EXPECT_EQ(code_of([&] { d.join_group("a", "g"); }), ErrorCode::AlreadyMember);
}

TEST(Constellation, ExitRules) {
  GroupDirectory d;
  d.create_group("a", "Solo", "solo", 0);
  d.exit_group("a", "solo");
  EXPECT_EQ(d.find("solo"), nullptr);
  EXPECT_TRUE(d.search_groups("Solo").empty());
  EXPECT_EQ(code_of([&] { d.exit_group("a", "solo"); }), ErrorCode::GroupNotFound);

  d.create_group("admin", "Trio", "t", 0);
  d.join_group("first", "t");
  d.join_group("second", "t");
  EXPECT_EQ(code_of([&] { d.exit_group("stranger", "t"); }), ErrorCode::NotAMember);
  d.exit_group("admin", "t");
  EXPECT_EQ(d.get("t").admin, "first");
  const auto details = d.group_details("second", "t");
  EXPECT_EQ(details.admin, "first");
  EXPECT_EQ(details.member_count, 2u);
  d.check_invariants();
}

TEST(Constellation, JoinThenExitRestoresRoster) {
  GroupDirectory d;
  d.create_group("a", "G", "g", 0);
  d.join_group("b", "g");
  d.join_group("c", "g");
  const auto before = d.get("g");
  d.join_group("x", "g");
  d.exit_group("x", "g");
  EXPECT_EQ(d.get("g"), before);
}

TEST(Constellation, PostsAreSequencedAndValidated) {
  GroupDirectory d;
  d.create_group("a", "G", "g", 0);
  d.join_group("b", "g");
  const auto m1 = d.post_message("a", "g", "hello", 1);
  const auto m2 = d.post_message("b", "g", "hi", 2);
  EXPECT_EQ(m1.seq, 1u);
  EXPECT_EQ(m2.seq, 2u);
  EXPECT_EQ(m1.message_id, "g-1");
  EXPECT_EQ(m2.sender, "b");
  EXPECT_EQ(code_of([&] { d.post_message("z", "g", "x", 3); }), ErrorCode::NotAMember);
  EXPECT_EQ(code_of([&] { d.post_message("a", "g", "", 3); }), ErrorCode::EmptyBody);
  EXPECT_EQ(code_of([&] { d.post_message("a", "g", " \n", 3); }), ErrorCode::EmptyBody);
  EXPECT_EQ(code_of([&] { d.post_message("a", "g", std::string(4097, 'x'), 3); }),
            ErrorCode::BodyTooLarge);
  EXPECT_NO_THROW(d.post_message("a", "g", std::string(4096, 'x'), 3));
  EXPECT_EQ(code_of([&] { d.post_message("a", "nope", "x", 3); }), ErrorCode::GroupNotFound);
}

TEST(Constellation, FetchPrefixProperty) {
  GroupDirectory d;
  d.create_group("a", "G", "g", 0);
  for (int i = 0; i < 20; ++i) d.post_message("a", "g", "m" + std::to_string(i), i);
  const auto all = d.fetch_messages("a", "g", 0);
  ASSERT_EQ(all.size(), 20u);
  EXPECT_TRUE(d.fetch_messages("a", "g", 20).empty());
  for (std::uint64_t k = 0; k <= 20; ++k) {
    auto head = std::vector<Message>(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k));
    const auto tail = d.fetch_messages("a", "g", k);
    head.insert(head.end(), tail.begin(), tail.end());
    EXPECT_EQ(head, all);
  }
  EXPECT_EQ(code_of([&] { d.fetch_messages("b", "g", 0); }), ErrorCode::NotAMember);
}

TEST(Constellation, DetailsAreMemberOnly) {
  GroupDirectory d;
  d.create_group("a", "G", "g", 0);
  d.join_group("b", "g");
  d.join_group("c", "g");
  const auto det = d.group_details("a", "g");
  EXPECT_EQ(det.member_count, 3u);
  EXPECT_EQ(det.admin, "a");
  EXPECT_EQ(det.members, (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_EQ(code_of([&] { d.group_details("z", "g"); }), ErrorCode::NotAMember);
  EXPECT_EQ(code_of([&] { d.group_details("a", "nope"); }), ErrorCode::GroupNotFound);
}

TEST(Constellation, ExitedMembersMessagesRemain) {
  GroupDirectory d;
  d.create_group("a", "G", "g", 0);
  d.join_group("b", "g");
  d.post_message("b", "g", "bye all", 1);
  d.exit_group("b", "g");
  const auto msgs = d.fetch_messages("a", "g", 0);
  ASSERT_EQ(msgs.size(), 1u);
  EXPECT_EQ(msgs[0].sender, "b");
}

TEST(Constellation, InterleavedPostersGetGaplessSeq) {
  GroupDirectory d;
  d.create_group(user(0), "G", "g", 0);
  for (std::size_t u = 1; u < 5; ++u) d.join_group(user(u), "g");
  Rng rng(11);
  for (int i = 0; i < 1000; ++i) {
    d.post_message(user(rng.below(5)), "g", "msg " + std::to_string(i), i);
  }
  const auto msgs = d.fetch_messages(user(0), "g", 0);
  ASSERT_EQ(msgs.size(), 1000u);
  for (std::size_t i = 0; i < msgs.size(); ++i) {
    EXPECT_EQ(msgs[i].seq, i + 1);
    EXPECT_EQ(msgs[i].body, "msg " + std::to_string(i));
  }
}

// Random operation sequences against the directory; after every step the
// structural invariants hold and every outcome matches a simple model.
TEST(Constellation, RandomizedInvariants) {
  GroupDirectory d;
  Rng rng(2026);
  constexpr std::size_t kUsers = 300;
  std::map<std::string, std::set<std::string>> roster;
  std::map<std::string, std::uint64_t> posts;
  std::size_t full_refusals = 0, ops = 0, next_id = 0;

  for (; ops < 20000; ++ops) {
    const auto u = user(rng.below(kUsers));
    std::string gid;
    if (!roster.empty()) {
      auto it = roster.begin();
      std::advance(it, static_cast<std::ptrdiff_t>(rng.below(roster.size())));
      gid = it->first;
    }
    const auto pick = rng.below(100);
    if (gid.empty() || (pick < 3 && roster.size() < 5)) {
      const std::string id = "g" + std::to_string(next_id++);
      d.create_group(u, "group " + id, id, static_cast<std::int64_t>(ops));
      roster[id] = {u};
      posts[id] = 0;
    } else if (pick < 70) {
      const auto code = code_of([&] { d.join_group(u, gid); });
      if (roster[gid].count(u)) {
        EXPECT_EQ(code, ErrorCode::AlreadyMember);
      } else if (roster[gid].size() >= kMaxMembers) {
        EXPECT_EQ(code, ErrorCode::GroupFull);
        ++full_refusals;
      } else {
        EXPECT_EQ(code, ErrorCode::IoError);
        roster[gid].insert(u);
      }
    } else if (pick < 80) {
      const auto code = code_of([&] { d.exit_group(u, gid); });
      if (roster[gid].count(u)) {
        EXPECT_EQ(code, ErrorCode::IoError);
        roster[gid].erase(u);
        if (roster[gid].empty()) {
          roster.erase(gid);
          posts.erase(gid);
          EXPECT_EQ(d.find(gid), nullptr);
        }
      } else {
        EXPECT_EQ(code, ErrorCode::NotAMember);
      }
    } else {
      const auto code = code_of([&] { d.post_message(u, gid, "hi", 0); });
      if (roster[gid].count(u)) {
        EXPECT_EQ(code, ErrorCode::IoError);
        ++posts[gid];
      } else {
        EXPECT_EQ(code, ErrorCode::NotAMember);
      }
    }

    ASSERT_NO_THROW(d.check_invariants()) << "after op " << ops;
    for (const auto& [id, members] : roster) {
      const Group& g = d.get(id);
      ASSERT_LE(g.members.size(), kMaxMembers);
      ASSERT_TRUE(g.has_member(g.admin));
      ASSERT_EQ(std::set<std::string>(g.members.begin(), g.members.end()), members);
      ASSERT_EQ(d.last_seq(id), posts[id]);
    }
  }
  EXPECT_EQ(d.group_count(), roster.size());
  for (const auto& [id, n] : posts) {
    const auto& log = d.log(id);
    ASSERT_EQ(log.size(), n);
    for (std::size_t i = 0; i < log.size(); ++i) EXPECT_EQ(log[i].seq, i + 1);
  }
  EXPECT_GT(full_refusals, 0u) << "the sequence never reached the member cap";
}

TEST(Constellation, Utf8Length) {
  EXPECT_EQ(utf8_length(""), 0u);
  EXPECT_EQ(utf8_length("abc"), 3u);
  EXPECT_EQ(utf8_length("é😢"), 2u);
}
