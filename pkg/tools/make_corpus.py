"""Write English word lists (all lengths, or one file per length) for synth/train.

    python tools/make_corpus.py out/words.txt
    python tools/make_corpus.py out/ --lengths 3 5 7 9 11 13
    python tools/make_corpus.py out/lines.txt --lines 3000
"""

import argparse
from pathlib import Path

from unspell.lexicon import english_lines, english_words, write_word_list


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("out")
    ap.add_argument("--top", type=int, default=90_000)
    ap.add_argument("--lengths", type=int, nargs="*")
    ap.add_argument("--lines", type=int, help="write this many frequency-sampled multi-word lines instead")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    if args.lines:
        write_word_list(args.out, english_lines(args.lines, args.seed))
        return
    if not args.lengths:
        write_word_list(args.out, english_words(args.top))
        return
    for n in args.lengths:
        words = english_words(args.top, n)
        write_word_list(Path(args.out) / f"words_len{n}.txt", words)
        print(f"length {n}: {len(words)} words")


if __name__ == "__main__":
    main()
