from propus.cli import main
import sys
sys.exit(main())
