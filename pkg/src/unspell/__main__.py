from unspell.cli import main

main()
