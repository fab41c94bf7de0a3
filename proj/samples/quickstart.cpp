// Mines samples/db1.csv with both sequence miners and a max-gap constraint,
// then replays it as a stream.
#include <fstream>
#include <iostream>

#include <seqmine/seqmine.hpp>

int main(int argc, char** argv) {
    const char* path = argc > 1 ? argv[1] : "samples/db1.csv";
    std::ifstream in(path);
    if (!in) {
        std::cerr << "cannot open " << path << '\n';
        return 1;
    }
    const auto db = seqmine::load_sequence_db(in);

    seqmine::Constraints c;
    c.min_support = 0.5;
    std::cout << "prefixspan, min_support 0.5\n";
    seqmine::write_patterns(std::cout, seqmine::prefixspan_mine(db, c).patterns, db.alphabet(), db.size());

    c.max_gap = 2;
    std::cout << "\ngsp, min_support 0.5, max_gap 2\n";
    seqmine::write_patterns(std::cout, seqmine::gsp_mine(db, c).patterns, db.alphabet(), db.size());

    seqmine::StreamMiner miner({.sigma = 0.5, .epsilon = 0.1, .batch_size = 2, .max_length = 3});
    for (const auto& s : db.sequences()) miner.push(s);
    std::cout << "\nstream, sigma 0.5, epsilon 0.1, batch 2\n";
    seqmine::write_patterns(std::cout, miner.finish(), db.alphabet(), miner.state().sequences_seen);
}
