from cospread.cli import main

raise SystemExit(main())
