#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include <seqmine/dataset.hpp>

#include "test_util.hpp"

using namespace seqmine;
using namespace seqmine::testing;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<ResultRecord> results(std::string_view text) {
    std::istringstream in{std::string(text)};
    return load_results(in);
}

Centi pct(const std::vector<ResultRecord>& rs, int year, std::string_view subject) {
    for (const auto& r : rs)
        if (r.year == year && r.subject_code == subject) return r.pass_pct;
    ADD_FAILURE() << "missing " << subject << " " << year;
    return {};
}

Errc code_of(auto&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error thrown";
    return Errc::ParseError;
}

} // namespace

TEST(LoadSequenceDb, ParsesDb1FirstSequence) {
    const auto d = load_sequence_db("s1,1,a\ns1,2,a b\ns1,3,c");
    ASSERT_EQ(d.size(), 1u);
    const auto& s = d[0];
    ASSERT_EQ(s.size(), 3u);
    const auto& a = d.alphabet();
    EXPECT_EQ(s[0].items, Itemset{*a.find("a")});
    EXPECT_EQ(s[1].items, (Itemset{*a.find("a"), *a.find("b")}));
    EXPECT_EQ(s[2].items, Itemset{*a.find("c")});
    EXPECT_EQ(s[2].time, 3);
}

TEST(LoadSequenceDb, MergesEqualTimesAndSorts) {
    auto d = load_sequence_db("s1,2,a\ns1,2,b");
    ASSERT_EQ(d[0].size(), 1u);
    EXPECT_EQ(d[0][0].items.size(), 2u);

    d = load_sequence_db("# comment\ns1,5,b\ns2,1,a\ns1,1,c\n\n");
    EXPECT_EQ(d.size(), 2u);
    EXPECT_EQ(d[0].id(), "s1");
    EXPECT_EQ(d[0][0].time, 1);
}

TEST(LoadSequenceDb, Errors) {
    EXPECT_EQ(code_of([] { load_sequence_db("s1,x,a"); }), Errc::NonIntegerTime);
    EXPECT_EQ(code_of([] { load_sequence_db("s1,1"); }), Errc::ParseError);
    EXPECT_EQ(code_of([] { load_sequence_db("s1,1,  "); }), Errc::ParseError);
    try {
        load_sequence_db("s1,1,a\ns1,2.5,b");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.line(), 2u);
        EXPECT_TRUE(e.is_input_error());
    }
}

TEST(LoadSequenceDb, ItemIdsFollowTokenOrder) {
    const auto d = load_sequence_db("s1,1,zeta\ns1,2,alpha");
    EXPECT_EQ(d.alphabet().token(0), "alpha");
    EXPECT_EQ(d.alphabet().token(1), "zeta");
}

TEST(LoadSequenceDb, RoundTrip) {
    std::mt19937_64 rng(61);
    for (int round = 0; round < 100; ++round) {
        std::vector<DataSequence> seqs;
        const auto n = std::uniform_int_distribution<int>(1, 6)(rng);
        for (int i = 0; i < n; ++i) seqs.push_back(random_sequence(rng, "seq" + std::to_string(i), 6, 5));
        const SequenceDatabase original(std::move(seqs), letters());
        std::ostringstream out;
        save_sequence_db(out, original);
        const auto back = load_sequence_db(out.str());
        std::ostringstream again;
        save_sequence_db(again, back);
        EXPECT_EQ(out.str(), again.str());
        ASSERT_EQ(back.size(), original.size());
        for (std::size_t s = 0; s < back.size(); ++s) {
            ASSERT_EQ(back[s].size(), original[s].size());
            for (std::size_t t = 0; t < back[s].size(); ++t) {
                EXPECT_EQ(back[s][t].time, original[s][t].time);
                std::set<std::string> want, got;
                for (ItemId i : original[s][t].items) want.insert(original.alphabet().token(i));
                for (ItemId i : back[s][t].items) got.insert(back.alphabet().token(i));
                EXPECT_EQ(want, got);
            }
        }
    }
}

TEST(SequenceCsvReader, ConsecutiveLinesFormOneSequence) {
    std::istringstream in("a,1,x\na,2,y\nb,1,x\n# skip\nb,1,z\na,9,x\n");
    Alphabet alphabet;
    SequenceCsvReader reader(SequenceCsvReader::from_stream(in), alphabet);
    std::vector<DataSequence> got;
    while (auto s = reader.next()) got.push_back(std::move(*s));
    ASSERT_EQ(got.size(), 3u);
    EXPECT_EQ(got[0].id(), "a");
    EXPECT_EQ(got[0].size(), 2u);
    EXPECT_EQ(got[1].size(), 1u);
    EXPECT_EQ(got[1][0].items.size(), 2u);
    EXPECT_EQ(got[2].id(), "a");
    EXPECT_FALSE(reader.next());
}

TEST(LoadTransactions, ParsesAndRejectsDuplicates) {
    std::istringstream in("t1,b a\nt2,a\n");
    const auto db = load_transactions(in);
    ASSERT_EQ(db.transactions.size(), 2u);
    EXPECT_EQ(db.transactions[0].size(), 2u);
    EXPECT_EQ(db.alphabet.token(0), "a");

    std::istringstream dup("t1,a\nt1,b\n");
    EXPECT_EQ(code_of([&] { load_transactions(dup); }), Errc::ParseError);
}

TEST(Results, BundledValues) {
    const auto rs = load_bundled_results();
    ASSERT_EQ(rs.size(), 25u);
    EXPECT_EQ(pct(rs, 2003, "BE-101"), Centi{6250});
    EXPECT_EQ(pct(rs, 2007, "BE-105"), Centi{2969});
    EXPECT_EQ(pct(rs, 2005, "BE-103"), Centi{9157});
    EXPECT_EQ(pct(rs, 2004, "BE-102"), Centi{6869});
    for (int y = 2003; y <= 2007; ++y) EXPECT_EQ(pct(rs, y, "BE-103"), pct(rs, y, "BE-104"));
}

TEST(Results, ShippedFileMatchesEmbeddedCopy) {
    const auto file = read_file(std::string(SEQMINE_SOURCE_DIR) + "/data/university_results.csv");
    EXPECT_EQ(file, std::string(bundled_results_csv));
}

TEST(Results, PinnedHash) {
    std::string canon;
    for (const auto& r : load_bundled_results())
        canon += std::to_string(r.year) + "," + r.subject_code + "," + r.pass_pct.str() + "\n";
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : canon) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    EXPECT_EQ(h, 0xce2169945d7cc87bULL);
}

TEST(Results, Errors) {
    EXPECT_EQ(code_of([] { results("year,subject_code,pass_pct\n2003,X,1\n2003,X,2\n"); }), Errc::DuplicateKey);
    EXPECT_EQ(code_of([] { results("year,subject_code,pass_pct\n2003,X,100.01\n"); }), Errc::OutOfRange);
    EXPECT_EQ(code_of([] { results("year,subject_code,pass_pct\n2003,X,-1\n"); }), Errc::OutOfRange);
    EXPECT_EQ(code_of([] { results("year,subject_code,pass_pct\n2003,X,1.234\n"); }), Errc::ParseError);
    EXPECT_EQ(code_of([] { results("2003,X,1\n"); }), Errc::ParseError);
}

TEST(Centi, ParseAndFormat) {
    EXPECT_EQ(Centi::parse("62.5").value, 6250);
    EXPECT_EQ(Centi::parse("7").value, 700);
    EXPECT_EQ(Centi::parse("-44.71").value, -4471);
    EXPECT_EQ(Centi{-4471}.signed_str(), "-44.71");
    EXPECT_EQ(Centi{1730}.signed_str(), "+17.30");
    EXPECT_EQ(Centi{0}.signed_str(), "0.00");
    EXPECT_THROW(Centi::parse("1."), Error);
    EXPECT_THROW(Centi::parse("abc"), Error);
}

TEST(Discretize, DefaultBands) {
    const auto d = discretize(load_bundled_results(), BandScheme::default_scheme());
    ASSERT_EQ(d.size(), 5u);
    const auto& a = d.alphabet();
    for (const auto& s : d.sequences()) {
        EXPECT_EQ(s.size(), 5u);
        if (s.id() == "BE-103") {
            for (const auto& t : s.transactions()) EXPECT_EQ(a.token(t.items.front()), "BE-103:A");
        }
        if (s.id() == "BE-105") {
            EXPECT_EQ(s[4].time, 2007);
            EXPECT_EQ(a.token(s[4].items.front()), "BE-105:F");
        }
    }
}

TEST(Discretize, AlphabetIsSubjectsTimesBandsHit) {
    const auto rs = results("year,subject_code,pass_pct\n2001,X,70\n2002,X,69.99\n2003,X,70\n2001,Y,100\n");
    const auto d = discretize(rs, BandScheme::default_scheme());
    EXPECT_EQ(d.alphabet().size(), 3u);
    const auto& x = d[0];
    EXPECT_EQ(d.alphabet().token(x[0].items.front()), "X:B");
    EXPECT_EQ(d.alphabet().token(x[1].items.front()), "X:C");
    EXPECT_EQ(d.alphabet().token(d[1][0].items.front()), "Y:A");
}

TEST(BandScheme, Boundaries) {
    const auto s = BandScheme::default_scheme();
    EXPECT_EQ(s.label_for(Centi{7000}), "B");
    EXPECT_EQ(s.label_for(Centi{6999}), "C");
    EXPECT_EQ(s.label_for(Centi{0}), "F");
    EXPECT_EQ(s.label_for(Centi{10000}), "A");
}

TEST(BandScheme, Errors) {
    for (const char* bad : {"", "50:F,40:C,100:A", "50:F,90:A", "50:F,x:A", "50:F,100:", "50F,100:A", "0:F,100:A"})
        EXPECT_EQ(code_of([&] { BandScheme::parse(bad); }), Errc::InvalidBands) << bad;
}

TEST(Trend, BundledExamples) {
    const auto t = trend(load_bundled_results());
    ASSERT_EQ(t.subjects.size(), 5u);
    const auto& be101 = t.subjects[0];
    EXPECT_EQ(be101.subject_code, "BE-101");
    EXPECT_FALSE(be101.points[0].delta);
    EXPECT_EQ(*be101.points[1].delta, Centi{1730});
    EXPECT_EQ(*be101.points[1].direction, Direction::up);

    const auto& be105 = t.subjects[4];
    EXPECT_EQ(*be105.points[4].delta, Centi{-4471});
    EXPECT_EQ(*be105.points[4].direction, Direction::down);

    bool flagged = false;
    for (const auto& a : t.anomalies) {
        if (a.subject_code == "BE-105" && a.year == 2007) flagged = true;
        EXPECT_FALSE(a.subject_code == "BE-101" && a.year == 2004);
        EXPECT_GT(a.delta.value < 0 ? -a.delta.value : a.delta.value, 2000);
    }
    EXPECT_TRUE(flagged);
}

TEST(Trend, ConstantSeriesIsFlat) {
    const auto t = trend(results("year,subject_code,pass_pct\n2001,X,50\n2002,X,50\n2003,X,50\n"));
    for (std::size_t i = 1; i < 3; ++i) EXPECT_EQ(*t.subjects[0].points[i].direction, Direction::flat);
    EXPECT_TRUE(t.anomalies.empty());
}

TEST(Trend, ThresholdIsStrict) {
    const auto rs = results("year,subject_code,pass_pct\n2001,X,50\n2002,X,70\n");
    EXPECT_TRUE(trend(rs).anomalies.empty());
    EXPECT_EQ(trend(rs, Centi{1999}).anomalies.size(), 1u);
}

TEST(Trend, NeedsTwoYears) {
    EXPECT_EQ(code_of([] { trend(results("year,subject_code,pass_pct\n2001,X,50\n")); }),
              Errc::InsufficientHistory);
}
