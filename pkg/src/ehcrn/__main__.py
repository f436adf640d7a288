from ehcrn.cli import main

raise SystemExit(main())
