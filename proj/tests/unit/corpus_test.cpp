#include <gtest/gtest.h>

#include <map>
#include <sstream>

#include "styx/corpus.hpp"

using namespace styx;

namespace {

CorpusReadResult read(const std::string& text) {
  std::istringstream in(text);
  return read_corpus_csv(in);
}

const std::string kHeader = "id,gender,age,topic,sign,date,text\n";

std::vector<GroupedRecord> grouped(std::map<AgeGroup, int> counts) {
  std::vector<GroupedRecord> out;
  int n = 0;
  for (auto [g, c] : counts)
    for (int i = 0; i < c; ++i) {
      BlogRecord r;
      r.author_id = std::to_string(++n);
      r.doc_id = "row-" + r.author_id;
      out.push_back({r, g});
    }
  return out;
}

}  // namespace

TEST(ReadCorpus, MapsFields) {
  const auto r = read(kHeader + "5114,male,25,Student,Leo,14-May-2004,\"Love pictures, baby!\"\n");
  ASSERT_EQ(r.records.size(), 1u);
  EXPECT_EQ(r.records[0].author_id, "5114");
  EXPECT_EQ(r.records[0].age, 25);
  EXPECT_EQ(r.records[0].text, "Love pictures, baby!");
  EXPECT_EQ(r.records[0].topic, "Student");
  EXPECT_EQ(r.records[0].date, "14-May-2004");
  EXPECT_EQ(r.records[0].doc_id, "row-1");
  EXPECT_TRUE(r.rejects.empty());
}

TEST(ReadCorpus, UnparseableAgeIsRejected) {
  const auto r = read(kHeader + "1,male,??,Student,Leo,d,hello\n");
  EXPECT_TRUE(r.records.empty());
  ASSERT_EQ(r.rejects.size(), 1u);
  EXPECT_EQ(r.rejects[0].reason, "unparseable age");
  EXPECT_EQ(r.rejects[0].line, 2u);
}

TEST(ReadCorpus, HeaderOnlyIsEmpty) {
  const auto r = read(kHeader);
  EXPECT_TRUE(r.records.empty());
  EXPECT_TRUE(r.rejects.empty());
  EXPECT_EQ(r.rows_in, 0u);
}

TEST(ReadCorpus, MissingMappedColumnIsError) {
  EXPECT_THROW(read("id,gender,topic,text\n1,m,t,x\n"), Error);
}

TEST(ReadCorpus, MissingFileIsError) { EXPECT_THROW(read_corpus_csv(std::string("/nonexistent/corpus.csv")), Error); }

TEST(ReadCorpus, MalformedQuotingNamesLine) {
  try {
    read(kHeader + "1,m,20,t,s,d,ok\n2,m,20,t,s,d,\"bad\"x\n");
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
}

TEST(ReadCorpus, AccountingHolds) {
  const auto r = read(kHeader + "1,m,20,t,s,d,a\n2,m,x,t,s,d,b\n3,m,30,t\n4,m,-3,t,s,d,c\n5,f,50,t,s,d,\"multi\nline\"\n");
  EXPECT_EQ(r.rows_in, r.records.size() + r.rejects.size());
  EXPECT_EQ(r.records.size(), 2u);
  EXPECT_EQ(r.records[1].text, "multi\nline");
}

TEST(ReadCorpus, TrimsSurroundingWhitespaceOnly) {
  const auto r = read(kHeader + "1,m,20,t,s,d,\"  two  spaces  \"\n");
  EXPECT_EQ(r.records.at(0).text, "two  spaces");
}

TEST(ReadCorpus, ColumnMappingIsHonored) {
  ColumnMapping m;
  m.author_id = "blogger";
  m.age = "years";
  m.text = "body";
  std::istringstream in("blogger,years,body\nb7,44,hello\n");
  const auto r = read_corpus_csv(in, m);
  ASSERT_EQ(r.records.size(), 1u);
  EXPECT_EQ(r.records[0].author_id, "b7");
  EXPECT_EQ(r.records[0].age, 44);
  EXPECT_FALSE(r.records[0].topic.has_value());
}

TEST(AgeGroups, Boundaries) {
  EXPECT_EQ(derive_age_group(18), AgeGroup::Young);
  EXPECT_EQ(derive_age_group(34), AgeGroup::Young);
  EXPECT_EQ(derive_age_group(35), AgeGroup::MiddleAged);
  EXPECT_EQ(derive_age_group(41), AgeGroup::MiddleAged);
  EXPECT_EQ(derive_age_group(42), AgeGroup::Old);
  EXPECT_EQ(derive_age_group(17), std::nullopt);
  EXPECT_EQ(derive_age_group(120), AgeGroup::Old);
  EXPECT_EQ(derive_age_group(0), std::nullopt);
  EXPECT_THROW(derive_age_group(-1), Error);
}

TEST(AgeGroups, PreimagesPartitionAdultAges) {
  for (int age = 0; age < 200; ++age) {
    const auto g = derive_age_group(age);
    EXPECT_EQ(g.has_value(), age >= 18) << age;
  }
}

TEST(AgeGroups, NamesRoundTrip) {
  for (AgeGroup g : kAgeGroups) EXPECT_EQ(parse_age_group(to_string(g)), g);
  EXPECT_EQ(parse_age_group("Teen"), std::nullopt);
}

TEST(Balance, DownsamplesToSmallestGroup) {
  const auto b = balance(grouped({{AgeGroup::Young, 100}, {AgeGroup::MiddleAged, 60}, {AgeGroup::Old, 80}}), 7);
  EXPECT_EQ(b.per_group_count, 60u);
  EXPECT_EQ(b.records.size(), 180u);
  std::map<AgeGroup, int> counts;
  for (const auto& r : b.records) ++counts[r.group];
  for (AgeGroup g : kAgeGroups) EXPECT_EQ(counts[g], 60);
  // Output is ordered by group.
  EXPECT_TRUE(std::is_sorted(b.records.begin(), b.records.end(),
                             [](const GroupedRecord& a, const GroupedRecord& c) { return a.group < c.group; }));
}

TEST(Balance, SingletonsAreKept) {
  const auto in = grouped({{AgeGroup::Young, 1}, {AgeGroup::MiddleAged, 1}, {AgeGroup::Old, 1}});
  for (std::uint64_t seed : {0ull, 1ull, 99ull}) {
    const auto b = balance(in, seed);
    ASSERT_EQ(b.records.size(), 3u);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(b.records[i].record, in[i].record);
  }
}

TEST(Balance, DeterministicForSeed) {
  const auto in = grouped({{AgeGroup::Young, 30}, {AgeGroup::MiddleAged, 20}, {AgeGroup::Old, 25}});
  const auto a = balance(in, 42), b = balance(in, 42);
  ASSERT_EQ(a.records.size(), b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) EXPECT_EQ(a.records[i].record, b.records[i].record);
}

TEST(Balance, SeedChangesMembershipNotCounts) {
  const auto in = grouped({{AgeGroup::Young, 30}, {AgeGroup::MiddleAged, 20}, {AgeGroup::Old, 25}});
  const auto a = balance(in, 1), b = balance(in, 2);
  EXPECT_EQ(a.per_group_count, b.per_group_count);
  EXPECT_EQ(a.records.size(), b.records.size());
  bool differs = false;
  for (std::size_t i = 0; i < a.records.size(); ++i) differs |= !(a.records[i].record == b.records[i].record);
  EXPECT_TRUE(differs);
}

TEST(Balance, EmptyGroupIsNamed) {
  try {
    balance(grouped({{AgeGroup::Young, 3}, {AgeGroup::Old, 2}}), 1);
    FAIL();
  } catch (const Error& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("empty groups"), std::string::npos);
    EXPECT_NE(msg.find("MiddleAged"), std::string::npos);
  }
}

TEST(Balance, CsvHasDocIdAndGroup) {
  auto in = grouped({{AgeGroup::Young, 1}, {AgeGroup::MiddleAged, 1}, {AgeGroup::Old, 1}});
  in[0].record.text = "a, \"quoted\" text";
  std::ostringstream out;
  write_balanced_csv(out, in);
  std::istringstream back(out.str());
  const auto r = read_corpus_csv(back);
  ASSERT_EQ(r.records.size(), 3u);
  EXPECT_EQ(r.records[0].doc_id, "row-1");
  EXPECT_EQ(r.records[0].text, in[0].record.text);
}

TEST(Rejects, ReportColumns) {
  std::ostringstream out;
  const std::vector<RejectedRow> rows = {{4, "unparseable age"}};
  write_reject_report(out, rows);
  EXPECT_EQ(out.str(), "line_number,reason\n4,unparseable age\n");
}
