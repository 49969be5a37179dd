"""python -m blowup1d"""

from .cli import main

raise SystemExit(main())
