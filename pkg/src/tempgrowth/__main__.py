from tempgrowth.cli import main

raise SystemExit(main())
